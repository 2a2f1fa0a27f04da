#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ttd/linalg.hpp"

using namespace ttd;

TEST_CASE("thin_svd on identity and diagonal matrices") {
    SvdResult r = thin_svd(Matrix::Identity(3, 3));
    CHECK((r.s - Vector::Ones(3)).norm() <= 1e-14);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0)  = 3;
    d(1, 1)  = 1;
    SvdResult rd = thin_svd(d);
    CHECK_THAT(rd.s(0), Catch::Matchers::WithinAbs(3.0, 1e-14));
    CHECK_THAT(rd.s(1), Catch::Matchers::WithinAbs(1.0, 1e-14));
    CHECK((rd.reconstruct() - d).norm() <= 1e-12);
}

TEST_CASE("thin_svd invariants on random matrices") {
    std::mt19937_64 eng(1);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix a    = gaussian_matrix(6, 4, eng);
        SvdResult r = thin_svd(a);
        REQUIRE(r.u.cols() == 4);
        REQUIRE(r.v.cols() == 4);
        CHECK((r.u.transpose() * r.u - Matrix::Identity(4, 4)).norm() <= 1e-10);
        CHECK((r.v.transpose() * r.v - Matrix::Identity(4, 4)).norm() <= 1e-10);
        for (Index i = 0; i + 1 < r.s.size(); ++i) CHECK(r.s(i) >= r.s(i + 1));
        CHECK(r.s(r.s.size() - 1) >= 0);
        CHECK((r.reconstruct() - a).norm() <= 1e-9 * a.norm());
    }
}

TEST_CASE("thin_svd rejects non-finite input") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1)  = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(thin_svd(a), std::invalid_argument);
}

TEST_CASE("trace_norm examples") {
    CHECK(trace_norm(Matrix::Zero(3, 4)) == 0.0);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0)  = 3;
    d(1, 1)  = 1;
    CHECK_THAT(trace_norm(d), Catch::Matchers::WithinAbs(4.0, 1e-12));

    std::mt19937_64 eng(2);
    Vector x = gaussian_matrix(5, 1, eng).col(0);
    Vector y = gaussian_matrix(3, 1, eng).col(0);
    CHECK_THAT(trace_norm(x * y.transpose()),
               Catch::Matchers::WithinRel(x.norm() * y.norm(), 1e-10));

    Matrix a = gaussian_matrix(4, 4, eng);
    CHECK(trace_norm(a) >= a.norm() - 1e-12);
}

TEST_CASE("trace norm is invariant under orthonormal maps (Property 1)") {
    std::mt19937_64 eng(3);
    for (int rep = 0; rep < 10; ++rep) {
        Matrix s = gaussian_matrix(3, 4, eng);
        Matrix u = random_orthonormal(6, 3, eng);
        Matrix v = random_orthonormal(7, 4, eng);
        CHECK_THAT(trace_norm(u * s * v.transpose()),
                   Catch::Matchers::WithinRel(trace_norm(s), 1e-9));
    }
}

TEST_CASE("svt examples") {
    std::mt19937_64 eng(4);
    Matrix a = gaussian_matrix(4, 3, eng);
    CHECK((svt(a, 0.0) - a).norm() <= 1e-10 * a.norm());

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0)  = 3;
    d(1, 1)  = 1;
    Matrix e = Matrix::Zero(2, 2);
    e(0, 0)  = 1;
    CHECK((svt(d, 2.0) - e).norm() <= 1e-12);

    CHECK_THROWS_AS(svt(a, -0.1), std::invalid_argument);
}

namespace {

double prox_objective(const Matrix &z, const Matrix &a, double tau) {
    return tau * trace_norm(z) + 0.5 * (z - a).squaredNorm();
}

} // namespace

TEST_CASE("svt output dominates random candidates on the prox objective") {
    std::mt19937_64 eng(5);
    for (int inst = 0; inst < 10; ++inst) {
        Matrix a      = gaussian_matrix(4, 4, eng);
        const double tau = 0.5;
        Matrix z      = svt(a, tau);
        double best   = prox_objective(z, a, tau);
        CHECK(best <= prox_objective(a, a, tau) + 1e-12);
        for (int c = 0; c < 1000; ++c) {
            Matrix cand = (c % 2) ? (z + 0.1 * gaussian_matrix(4, 4, eng)).eval()
                                  : gaussian_matrix(4, 4, eng);
            REQUIRE(best <= prox_objective(cand, a, tau) + 1e-10);
        }
    }
}

TEST_CASE("svt is nonexpansive and rank-decreasing") {
    std::mt19937_64 eng(6);
    for (int rep = 0; rep < 50; ++rep) {
        Matrix a = gaussian_matrix(5, 4, eng);
        Matrix b = gaussian_matrix(5, 4, eng);
        CHECK((svt(a, 0.7) - svt(b, 0.7)).norm() <= (a - b).norm() + 1e-12);

        auto rank = [](const Matrix &m) {
            Vector s = thin_svd(m).s;
            if (s.size() == 0 || s(0) <= 0) return Index(0);
            Index r = 0;
            while (r < s.size() && s(r) > 1e-9 * s(0)) ++r;
            return r;
        };
        Matrix sa = svt(a, 0.7);
        CHECK(trace_norm(sa) <= trace_norm(a) + 1e-12);
        CHECK(rank(sa) <= rank(a));
    }
}

TEST_CASE("procrustes examples and invariants") {
    CHECK((procrustes(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() <= 1e-12);
    CHECK((procrustes(2.0 * Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() <= 1e-12);

    std::mt19937_64 eng(7);
    Matrix a = gaussian_matrix(5, 3, eng);
    Matrix p = procrustes(a);
    CHECK((p.transpose() * p - Matrix::Identity(3, 3)).norm() <= 1e-10);
}

TEST_CASE("procrustes output dominates random orthonormal candidates") {
    std::mt19937_64 eng(8);
    for (int inst = 0; inst < 10; ++inst) {
        Matrix a     = gaussian_matrix(5, 3, eng);
        double best  = (procrustes(a).transpose() * a).trace();
        for (int c = 0; c < 1000; ++c) {
            Matrix cand = random_orthonormal(5, 3, eng);
            REQUIRE((cand.transpose() * a).trace() <= best + 1e-10);
        }
    }
}

TEST_CASE("numerical rank counts singular values at or above 1% of the largest") {
    Vector s(4);
    s << 10.0, 0.5, 0.1, 0.0999;
    CHECK(numerical_rank(s) == 3); // ties at the threshold are included
    CHECK(numerical_rank(Vector(Vector::Zero(3))) == 0);
    CHECK(numerical_rank(Vector()) == 0);
    CHECK(numerical_rank(Matrix(Matrix::Zero(3, 3))) == 0);
    CHECK(numerical_rank(Matrix(Matrix::Identity(4, 4))) == 4);

    std::mt19937_64 eng(9);
    Matrix lowrank = gaussian_matrix(6, 2, eng) * gaussian_matrix(2, 5, eng);
    CHECK(numerical_rank(lowrank) == 2);
}

TEST_CASE("svd size instrumentation records the largest input") {
    svd_stats().reset();
    thin_svd(Matrix::Identity(3, 7));
    thin_svd(Matrix::Identity(5, 2));
    CHECK(svd_stats().max_cells == 21);
    svd_stats().reset();
    CHECK(svd_stats().max_cells == 0);
}
