#include <doctest.h>

#include <cmath>

#include "oatm/rng.hpp"
#include "oatm/transform.hpp"

using namespace oatm;

namespace {

Affine random_affine(Rng& rng, double tmax = 20.0) {
    // SVD-form construction keeps the singular values in a known range.
    const double th1 = rng.uniform(-3.0, 3.0);
    const double th2 = rng.uniform(-3.0, 3.0);
    const double s1 = rng.uniform(0.7, 1.4);
    const double s2 = rng.uniform(0.7, 1.4);
    const double c1 = std::cos(th1), n1 = std::sin(th1);
    const double c2 = std::cos(th2), n2 = std::sin(th2);
    // R(th1) * diag(s1,s2) * R(th2)
    return Affine{c1 * s1 * c2 - n1 * s2 * n2, -c1 * s1 * n2 - n1 * s2 * c2,
                  n1 * s1 * c2 + c1 * s2 * n2, -n1 * s1 * n2 + c1 * s2 * c2,
                  rng.uniform(-tmax, tmax),    rng.uniform(-tmax, tmax)};
}

bool affine_close(const Transform& f, const Transform& g, double tol) {
    const Affine a = to_affine(f), b = to_affine(g);
    return std::abs(a.a11 - b.a11) < tol && std::abs(a.a12 - b.a12) < tol &&
           std::abs(a.a21 - b.a21) < tol && std::abs(a.a22 - b.a22) < tol &&
           std::abs(a.tx - b.tx) < tol && std::abs(a.ty - b.ty) < tol;
}

// Oracle: smallest singular value via eigenvalues of A^T A.
double smin_oracle(const Affine& a) {
    const double e = a.a11 * a.a11 + a.a21 * a.a21;
    const double f = a.a11 * a.a12 + a.a21 * a.a22;
    const double g = a.a12 * a.a12 + a.a22 * a.a22;
    const double lam = ((e + g) - std::sqrt((e - g) * (e - g) + 4 * f * f)) / 2.0;
    return std::sqrt(std::max(lam, 0.0));
}

}  // namespace

TEST_CASE("apply") {
    CHECK(apply(Translation{3, -1}, {5, 5}) == PixelCoord{8, 4});
    CHECK(apply(Affine{}, {7, 2}) == PixelCoord{7, 2});
    // 90 degree rotation
    CHECK(apply(Affine{0, -1, 1, 0, 0, 0}, {1, 0}) == PixelCoord{0, 1});
    // ties round away from zero
    CHECK(apply(Affine{1, 0, 0, 1, 0.5, -0.5}, {0, 0}) == PixelCoord{1, -1});
}

TEST_CASE("compose") {
    const Transform a = Translation{1, 2}, b = Translation{3, 4};
    CHECK(std::get<Translation>(compose(a, b)) == Translation{4, 6});

    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        const Transform f = random_affine(rng);
        CHECK(affine_close(compose(f, Affine{}), f, 1e-12));
        CHECK(affine_close(compose(f, invert(f)), Affine{}, 1e-9));
        CHECK(affine_close(compose(invert(f), f), Affine{}, 1e-9));
    }

    // translation promotes to affine when mixed
    const Transform mixed = compose(Translation{1, 0}, Affine{2, 0, 0, 2, 0, 0});
    CHECK(std::get<Affine>(mixed).a11 == 2.0);
    CHECK(std::get<Affine>(mixed).tx == 1.0);
}

TEST_CASE("compose is associative") {
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        const Transform f = random_affine(rng), g = random_affine(rng), h = random_affine(rng);
        CHECK(affine_close(compose(compose(f, g), h), compose(f, compose(g, h)), 1e-9));
    }
}

TEST_CASE("invert") {
    CHECK(std::get<Translation>(invert(Translation{3, -1})) == Translation{-3, 1});
    CHECK(std::get<Translation>(invert(Translation{0, 0})) == Translation{0, 0});
    CHECK_THROWS_AS(invert(Affine{1, 2, 2, 4, 0, 0}), SingularTransformError);
}

TEST_CASE("delta") {
    CHECK(delta(Translation{3, 0}, Translation{0, 4}, 32, 32) == doctest::Approx(5.0));
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        const Transform f = random_affine(rng);
        CHECK(delta(f, f, 32, 32) == 0.0);
    }

    // corner evaluation agrees with the exhaustive template scan
    for (int i = 0; i < 20; ++i) {
        const Transform f = random_affine(rng), g = random_affine(rng);
        double brute = 0.0;
        for (int y = 0; y < 32; ++y) {
            for (int x = 0; x < 32; ++x) {
                const Vec2 p{static_cast<double>(x), static_cast<double>(y)};
                const Vec2 a = apply_continuous(f, p), b = apply_continuous(g, p);
                brute = std::max(brute, std::hypot(a.x - b.x, a.y - b.y));
            }
        }
        CHECK(delta(f, g, 32, 32) == doctest::Approx(brute).epsilon(1e-9));
    }
}

TEST_CASE("delta is a pseudometric") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const Transform f = random_affine(rng), g = random_affine(rng), h = random_affine(rng);
        const double fg = delta(f, g, 16, 16);
        const double gh = delta(g, h, 16, 16);
        const double fh = delta(f, h, 16, 16);
        CHECK(fg >= 0.0);
        CHECK(fg == doctest::Approx(delta(g, f, 16, 16)));
        CHECK(fh <= fg + gh + 1e-9);
    }
}

TEST_CASE("min_scale") {
    CHECK(min_scale(Translation{17, -4}) == 1.0);
    CHECK(min_scale(Affine{2, 0, 0, 2, 5, 5}) == doctest::Approx(2.0));

    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        const Affine a = random_affine(rng);
        CHECK(min_scale(a) == doctest::Approx(smin_oracle(a)).epsilon(1e-9));
    }
}

TEST_CASE("min_scale submultiplicative on zero-offset affines") {
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        Affine a = random_affine(rng, 0.0), b = random_affine(rng, 0.0);
        const Transform ab = compose(a, b);
        CHECK(min_scale(ab) >= min_scale(a) * min_scale(b) - 1e-9);
    }
}

TEST_CASE("apply-invert round trip stays within rounding distance") {
    Rng rng(19);
    for (int i = 0; i < 100; ++i) {
        const Affine a = random_affine(rng);
        REQUIRE(min_scale(a) >= 2.0 / 3.0);
        const Transform f = a, finv = invert(a);
        for (int j = 0; j < 20; ++j) {
            const PixelCoord p{static_cast<int>(rng.below(32)), static_cast<int>(rng.below(32))};
            const PixelCoord back = apply(finv, apply(f, p));
            CHECK(std::hypot(back.x - p.x, back.y - p.y) <= 1.5);
        }
    }
}

TEST_CASE("SpaceSpec validation") {
    CHECK_THROWS_AS(SpaceSpec::translation(10, 5, 20), ContractViolation);
    CHECK_THROWS_AS(SpaceSpec::affine(10, 20, 20, 1.5, 0.5, 0, 0), ContractViolation);
    CHECK_THROWS_AS(SpaceSpec::affine(10, 20, 20, 1, 1, 0.5, -0.5), ContractViolation);
    const SpaceSpec ok = SpaceSpec::affine(10, 20, 20, 0.9, 1.1, -0.1, 0.1);
    CHECK(ok.placements_x() == 11);
}
