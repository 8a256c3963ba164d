// Runs every acceptance criterion on the reference model and prints one
// PASS/FAIL line per criterion, with the computed and expected values below.

#include <gtest/gtest.h>

#include <iostream>

#include "wavefront/acceptance.hpp"

namespace {

wavefront::acceptance::Suite& suite() {
    static wavefront::acceptance::Suite s;
    return s;
}

class Acceptance : public ::testing::TestWithParam<int> {};

TEST_P(Acceptance, Criterion) {
    const auto cr = suite().run(GetParam());
    std::cout << wavefront::acceptance::format(cr) << std::flush;
    EXPECT_TRUE(cr.pass) << "criterion " << cr.id << " (" << cr.title << ") failed";
}

INSTANTIATE_TEST_SUITE_P(Criteria, Acceptance, ::testing::Range(1, wavefront::acceptance::Suite::kCount + 1),
                         [](const ::testing::TestParamInfo<int>& info) { return "C" + std::to_string(info.param); });

}  // namespace

int main(int argc, char** argv) {
    ::testing::InitGoogleTest(&argc, argv);
    const int rc = RUN_ALL_TESTS();
    std::cout << "\nsummary: one line per criterion above; see [FAIL] entries for details\n";
    return rc;
}
