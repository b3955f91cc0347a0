#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "skelbd/skeleton.hpp"
#include "skelbd/synth.hpp"

using namespace skelbd;

TEST_CASE("default topology shape") {
    const SkeletonTopology topo = default_topology();
    CHECK(topo.joint_count == 25);
    CHECK(topo.root() == 1);
    CHECK(topo.parent_of(1) == 0);
    CHECK(topo.parent_of(2) == 1);
    CHECK(topo.parent_of(21) == 2);
    CHECK(topo.parent_of(22) == 8);
    CHECK(topo.parent_of(25) == 12);
    CHECK(topo.names[3] == "Head");
}

TEST_CASE("every joint reaches the root in fewer than joint_count steps") {
    const SkeletonTopology topo = default_topology();
    for (JointId j = 1; j <= topo.joint_count; ++j) {
        JointId walk = j;
        int steps = 0;
        while (walk != 0) {
            walk = topo.parent_of(walk);
            ++steps;
            REQUIRE(steps < topo.joint_count);
        }
    }
}

TEST_CASE("chains of the trigger actions") {
    const SkeletonTopology topo = default_topology();
    CHECK(chain(topo, 3, 4) == std::vector<JointId>{3, 4});
    CHECK(chain(topo, 5, 8) == std::vector<JointId>{5, 6, 7, 8});
    CHECK(chain(topo, 9, 12) == std::vector<JointId>{9, 10, 11, 12});
    CHECK(chain(topo, 1, 2) == std::vector<JointId>{1, 2});
}

TEST_CASE("chain edge cases") {
    const SkeletonTopology topo = default_topology();
    CHECK(chain(topo, 4, 4) == std::vector<JointId>{4});
    CHECK_THROWS_AS(chain(topo, 4, 3), NotOnChain);
    CHECK_THROWS_AS(chain(topo, 13, 8), NotOnChain);
}

TEST_CASE("chain structure: starts at root, ends at key, parent-linked") {
    const SkeletonTopology topo = default_topology();
    for (JointId key = 1; key <= topo.joint_count; ++key) {
        const std::vector<JointId> c = chain(topo, 1, key);
        CHECK(c.front() == 1);
        CHECK(c.back() == key);
        for (std::size_t i = 1; i < c.size(); ++i) CHECK(topo.parent_of(c[i]) == c[i - 1]);
    }
}

TEST_CASE("bone vector and length") {
    const SkeletonTopology topo = default_topology();
    SkeletonFrame frame;
    frame.positions.assign(25, Vec3::Zero());
    frame.at(1) = Vec3(0, 0, 0);
    frame.at(2) = Vec3(0, 1, 0);

    CHECK(bone_vector(frame, topo, 2) == Vec3(0, 1, 0));
    CHECK(bone_length(frame, topo, 2) == 1.0);
    CHECK(bone_length(frame, topo, 21) == 1.0);  // 21's parent is 2 at (0,1,0)
    CHECK_THROWS_AS(bone_vector(frame, topo, 1), RootHasNoBone);
}

TEST_CASE("validate: all-zero frame flags every non-root bone") {
    const SkeletonTopology topo = default_topology();
    SkeletonSequence seq;
    seq.label = 0;
    SkeletonFrame frame;
    frame.positions.assign(25, Vec3::Zero());
    seq.frames.push_back(frame);

    const std::vector<Finding> findings = validate_sequence(seq, topo);
    int zero_bones = 0;
    for (const Finding& f : findings)
        if (f.kind == FindingKind::ZeroLengthBone) ++zero_bones;
    CHECK(zero_bones == 24);
}

TEST_CASE("validate: well-formed synthetic sequence is clean") {
    const SkeletonTopology topo = default_topology();
    const SkeletonSequence seq = make_synthetic_sequence(1, 30, 42, 0.002);
    CHECK(validate_sequence(seq, topo).empty());
}

TEST_CASE("validate: a single NaN yields exactly one non-finite finding") {
    const SkeletonTopology topo = default_topology();
    SkeletonSequence seq = make_synthetic_sequence(0, 10, 7, 0.0);
    seq.frames[3].at(9).y() = std::nan("");

    int non_finite = 0;
    for (const Finding& f : validate_sequence(seq, topo)) {
        if (f.kind == FindingKind::NonFinite) {
            ++non_finite;
            CHECK(f.frame == 3);
            CHECK(f.joint == 9);
        }
    }
    CHECK(non_finite == 1);
}

TEST_CASE("validate: joint count mismatch reported per frame") {
    const SkeletonTopology topo = default_topology();
    SkeletonSequence seq = make_synthetic_sequence(0, 4, 1, 0.0);
    seq.frames[2].positions.pop_back();

    int mismatches = 0;
    for (const Finding& f : validate_sequence(seq, topo))
        if (f.kind == FindingKind::JointCountMismatch) ++mismatches;
    CHECK(mismatches == 1);
}

TEST_CASE("subtree and children") {
    const SkeletonTopology topo = default_topology();
    const std::vector<JointId> hand = topo.subtree(8);
    CHECK(hand == std::vector<JointId>{8, 22, 23});
    CHECK(topo.children(1) == std::vector<JointId>{2, 13, 17});
    CHECK(topo.subtree(1).size() == 25);
}
