#include "doctest.h"
#include "nflab/int_linalg.hpp"

#include <numeric>

using namespace nflab;

TEST_CASE("exact determinant on small integer matrices") {
    IntMat a(2, 2);
    a << 3, 7, 1, -2;
    CHECK(det_exact(a) == -13);

    IntMat b(3, 3);
    b << 2, 0, 1, -1, 3, 4, 0, 5, -2;
    // expanded by hand: 2*(3*-2 - 4*5) - 0 + 1*(-1*5 - 0) = -52 - 5
    CHECK(det_exact(b) == -57);

    IntMat id = IntMat::Identity(5, 5);
    CHECK(det_exact(id) == 1);

    IntMat sing(3, 3);
    sing << 1, 2, 3, 2, 4, 6, 7, 8, 9;
    CHECK(det_exact(sing) == 0);
}

TEST_CASE("adjugate satisfies A adj(A) = det(A) I") {
    IntMat a(3, 3);
    a << 4, -1, 2, 0, 3, 5, 1, 1, -2;
    std::int64_t d = det_exact(a);
    IntMat prod = a * adjugate(a);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(prod(i, j) == (i == j ? d : 0));
}

TEST_CASE("smith invariant factors match hand-computed values") {
    IntMat a(2, 2);
    a << 2, 4, 6, 8;
    auto f = smith_diagonal(a);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == 2);
    CHECK(f[1] == 4); // det 16-24 = -8 -> 2*4

    IntMat b(3, 3);
    b << 2, 0, 0, 0, 3, 0, 0, 0, 5;
    f = smith_diagonal(b);
    REQUIRE(f.size() == 3);
    CHECK(f[0] == 1);
    CHECK(f[1] == 1);
    CHECK(f[2] == 30);

    for (size_t i = 1; i < f.size(); ++i) CHECK(f[i] % f[i - 1] == 0);
}

TEST_CASE("column lattice index equals |det| for square nonsingular input") {
    IntMat a(3, 3);
    a << 3, 1, 0, 0, 2, 1, 1, 0, 4;
    CHECK(column_lattice_index(a) == std::llabs(det_exact(a)));
}

TEST_CASE("column lattice index of a wide matrix: gcd behaviour on Z") {
    IntMat a(1, 2);
    a << 6, 10;
    CHECK(column_lattice_index(a) == std::gcd(6, 10));
}

TEST_CASE("checked arithmetic raises on overflow") {
    std::int64_t big = std::int64_t(1) << 62;
    CHECK_THROWS_AS((void)checked_add(big, big), NumericError);
    CHECK_THROWS_AS((void)checked_mul(big, 4), NumericError);
    CHECK(checked_add(big, -big) == 0);
}
