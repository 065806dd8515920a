#include <doctest.h>

#include "locspec/errors.hpp"
#include "locspec/potential.hpp"
#include "support.hpp"

using namespace locspec;
using namespace locspec::testing;

TEST_SUITE("potential") {

TEST_CASE("evaluation examples") {
    CHECK(HermitianPotential::zero(1).at(0.5)(0, 0) == Complex(0.0));

    const auto step = HermitianPotential::delta_comb(1, {0.5}, {scalar(-10.0)});
    CHECK(step.at(0.3)(0, 0) == Complex(0.0));
    CHECK(step.at(0.7)(0, 0) == Complex(-10.0));
    CHECK(step.at(0.5)(0, 0) == Complex(-10.0));  // right-continuous
    CHECK(step.squared_at(0.7)(0, 0) == Complex(100.0));

    CHECK(cubic(1.0).at(1.0)(0, 0).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const auto diag = HermitianPotential::from_polynomial_pieces(
        2, {{-kInf, kInf, {Matrix::Zero(2, 2), Matrix(Eigen::Vector2cd(1.0, 2.0).asDiagonal())}, std::nullopt}});
    const Matrix sq = diag.squared_at(1.0);
    CHECK(sq(0, 0) == Complex(1.0));
    CHECK(sq(1, 1) == Complex(4.0));
    CHECK(sq(0, 1) == Complex(0.0));
}

TEST_CASE("out of support is a domain error") {
    const auto p = HermitianPotential::from_polynomial_pieces(1, {{0.0, 1.0, {scalar(1.0)}, std::nullopt}});
    CHECK_THROWS_AS(p.at(1.5), DomainError);
    CHECK_THROWS_AS(p.at(-0.1), DomainError);
    CHECK_NOTHROW(p.at(1.0));
}

TEST_CASE("breakpoints") {
    const auto step = HermitianPotential::delta_comb(1, {0.5}, {scalar(2.0)});
    CHECK(step.breakpoints_in({0.0, 1.0}) == std::vector<double>{0.5});
    CHECK(HermitianPotential::zero(1).breakpoints_in({0.0, 1.0}).empty());

    const auto comb = HermitianPotential::delta_comb(1, {0.0}, {scalar(-5.0)}, Periodicity{1.0, 0.0});
    CHECK(comb.breakpoints_in({-0.5, 2.5}) == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(comb.breakpoints_in({0.0, 1.0}).empty());  // strictly inside only
}

TEST_CASE("builders") {
    const auto comb = HermitianPotential::delta_comb(1, {0.5}, {scalar(2.0)});
    REQUIRE(comb.jumps().size() == 1);
    CHECK(comb.jumps()[0].x == 0.5);
    CHECK(comb.jumps()[0].dq(0, 0) == Complex(2.0));

    std::vector<double> x;
    std::vector<Matrix> q;
    for (int i = 0; i <= 20; ++i) {
        x.push_back(0.1 * i);
        q.push_back(scalar(1.75));
    }
    const auto sampled = HermitianPotential::antiderivative_of_samples(x, q);
    for (double t : {0.0, 0.37, 1.0, 1.99, 2.0}) CHECK(sampled.at(t)(0, 0).real() == doctest::Approx(1.75 * t).epsilon(1e-14));

    Matrix bad(2, 2);
    bad << 1.0, 2.0, 3.0, 4.0;
    CHECK_THROWS_AS(HermitianPotential::from_polynomial_pieces(2, {{0.0, 1.0, {bad}, std::nullopt}}), ValidationError);
    CHECK_THROWS_AS(HermitianPotential::delta_comb(2, {0.5}, {bad}), ValidationError);
    CHECK_THROWS_AS(HermitianPotential::from_polynomial_pieces(1, {{0.0, 1.0, {scalar(1)}, std::nullopt},
                                                                    {1.5, 2.0, {scalar(1)}, std::nullopt}}),
                    ValidationError);
    std::vector<Matrix> too_many(kMaxPieceDegree + 2, scalar(1.0));
    CHECK_THROWS_AS(HermitianPotential::from_polynomial_pieces(1, {{0.0, 1.0, too_many, std::nullopt}}),
                    ValidationError);
}

TEST_CASE("property: stored values are exactly Hermitian and Q^2 matches the product") {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const int m = rng.integer(1, 4);
        const auto p = rng.potential(m, -2.0, 3.0);
        for (int k = 0; k < 25; ++k) {
            const double x = rng.uniform(-2.0, 3.0);
            const Matrix q = p.at(x);
            CHECK(hermitian_defect(q) == 0.0);
            const Matrix prod = q * q;
            const double scale = 1.0 + prod.cwiseAbs().maxCoeff();
            CHECK((p.squared_at(x) - prod).cwiseAbs().maxCoeff() <= 1e-14 * scale);
            CHECK(hermitian_defect(p.squared_at(x)) == 0.0);
        }
    }
}

TEST_CASE("property: periodic drift is independent of x") {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = rng.integer(1, 3);
        const double period = rng.uniform(0.5, 2.0);
        const double start = rng.uniform(-1.0, 1.0);
        std::vector<Matrix> coeffs{rng.hermitian(m), rng.hermitian(m), rng.hermitian(m)};
        const auto p = HermitianPotential::from_polynomial_pieces(
            m, {{start, start + 0.4 * period, coeffs, start}, {start + 0.4 * period, start + period, {rng.hermitian(m)}, std::nullopt}},
            {{start + 0.7 * period, rng.hermitian(m)}}, Periodicity{period, start});
        const Matrix d0 = p.at(0.123 + period) - p.at(0.123);
        for (int k = 0; k < 20; ++k) {
            const double x = rng.uniform(-10.0, 10.0);
            const Matrix d = p.at(x + period) - p.at(x);
            CHECK((d - d0).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + d0.cwiseAbs().maxCoeff() + p.at(x).cwiseAbs().maxCoeff()));
            CHECK(hermitian_defect(p.at(x)) == 0.0);
        }
        CHECK((p.drift() - d0).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + d0.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("segment polynomial reproduces Q between breakpoints") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = rng.potential(2, 0.0, 4.0);
        std::vector<double> cuts{0.0};
        for (double b : p.breakpoints_in({0.0, 4.0})) cuts.push_back(b);
        cuts.push_back(4.0);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const PolyMatrix seg = p.segment({cuts[i], cuts[i + 1]});
            for (double t : {0.1, 0.5, 0.9}) {
                const double x = cuts[i] + t * (cuts[i + 1] - cuts[i]);
                CHECK((seg(x) - p.at(x)).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + p.at(x).cwiseAbs().maxCoeff()));
            }
        }
    }
}

TEST_CASE("transformations") {
    const auto base = cubic(1.0);
    CHECK(shifted(base, 2.0).at(1.5)(0, 0).real() == doctest::Approx(1.5 * 1.5 * 1.5 / 3.0 + 3.0).epsilon(1e-14));
    CHECK(gauge_shifted(base, scalar(4.0)).at(0.5)(0, 0).real() == doctest::Approx(0.125 / 3.0 + 4.0).epsilon(1e-14));

    Rng rng(14);
    const Matrix u = rng.unitary(2);
    const auto two = direct_sum(base, HermitianPotential::delta_comb(1, {0.5}, {scalar(-3.0)}));
    CHECK(two.dimension() == 2);
    CHECK(two.at(0.7)(1, 1) == Complex(-3.0));
    CHECK(two.at(0.7)(0, 1) == Complex(0.0));
    const auto conj = conjugated(two, u);
    const Matrix expect = u * two.at(0.7) * u.adjoint();
    CHECK((conj.at(0.7) - expect).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(conjugated(two, Matrix::Constant(2, 2, 1.0)), ValidationError);
}

}  // TEST_SUITE
