#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <ewkit/expfam.hpp>
#include <ewkit/rng.hpp>

using namespace ewkit;

TEST_CASE("gaussian state validates its inputs") {
    Vec m = Vec::Zero(2);
    Mat asym(2, 2);
    asym << 1.0, 0.2, 0.0, 1.0;
    CHECK_THROWS(GaussianState(m, asym));

    Mat indef(2, 2);
    indef << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS(GaussianState(m, indef));

    Mat ill = Mat::Identity(2, 2);
    ill(1, 1) = 1e-14;
    CHECK_THROWS(GaussianState(m, ill));

    Mat cov = 2.0 * Mat::Identity(2, 2);
    Mat wrong_prec = Mat::Identity(2, 2);
    CHECK_THROWS(GaussianState(m, cov, wrong_prec));
}

TEST_CASE("gaussian divergence closed form") {
    // kl(N(0, 2I) || N(0, I)) in d = 2: (1/2)(-ln 4 + 4 - 2).
    GaussianState q(Vec::Zero(2), 2.0 * Mat::Identity(2, 2));
    GaussianState p(Vec::Zero(2), Mat::Identity(2, 2));
    double expected = 0.5 * (-std::log(4.0) + 4.0 - 2.0);
    CHECK(kl_gaussian(q, p) == Catch::Approx(expected).epsilon(1e-12));
    CHECK(kl_gaussian(p, p) == Catch::Approx(0.0).margin(1e-12));
    CHECK(kl_gaussian(q, q) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("gaussian divergence is nonnegative on random pairs") {
    CounterRng rng(1, 100);
    for (int rep = 0; rep < 100; ++rep) {
        int d = 1 + rng.uniform_int(3);
        auto random_gauss = [&] {
            Mat a = Mat::NullaryExpr(d, d, [&](int, int) { return rng.normal(); });
            Mat cov = a * a.transpose() + 0.3 * Mat::Identity(d, d);
            return GaussianState(rng.normal_vec(d), cov);
        };
        GaussianState q = random_gauss(), p = random_gauss();
        CHECK(kl_gaussian(q, p) >= -1e-10);
    }
}

TEST_CASE("poisson divergence against truncated series oracle") {
    // kl(Poi(q) || Poi(p)) = sum_k q^k e^{-q}/k! * [k ln(q/p) - q + p].
    auto oracle = [](double q, double p) {
        double out = 0.0;
        double log_pmf = -q;  // ln P(0)
        for (int k = 0; k <= 200; ++k) {
            if (k > 0) log_pmf += std::log(q) - std::log(double(k));
            out += std::exp(log_pmf) *
                   (k * std::log(q / p) - q + p);
        }
        return out;
    };
    CounterRng rng(2, 101);
    for (int rep = 0; rep < 20; ++rep) {
        double q = rng.uniform(0.2, 5.0), p = rng.uniform(0.2, 5.0);
        PoissonProductState sq(Vec::Constant(1, q)), sp(Vec::Constant(1, p));
        CHECK(kl_poisson_product(sq, sp) ==
              Catch::Approx(oracle(q, p)).margin(1e-8));
    }
    // Product form adds per coordinate.
    Vec a(2), b(2);
    a << 1.0, 2.0;
    b << 3.0, 0.5;
    PoissonProductState sa(a), sb(b);
    double sum = oracle(1.0, 3.0) + oracle(2.0, 0.5);
    CHECK(kl_poisson_product(sa, sb) == Catch::Approx(sum).margin(1e-8));
}

TEST_CASE("bernoulli divergence edge cases return infinity, never throw") {
    CHECK(kl_bernoulli(0.5, 0.0) == kInf);
    CHECK(kl_bernoulli(0.5, 1.0) == kInf);
    CHECK(kl_bernoulli(0.0, 0.0) == 0.0);
    CHECK(kl_bernoulli(1.0, 1.0) == 0.0);
    CHECK(kl_bernoulli(0.3, 0.3) == Catch::Approx(0.0).margin(1e-14));
    CHECK_THROWS(kl_bernoulli(-0.1, 0.5));
}

TEST_CASE("quadratic lower bound on the bernoulli divergence") {
    // kl(x, y) >= 2 (x - y)^2 on a 1000-point grid per axis.
    for (int i = 0; i <= 1000; ++i) {
        for (int j = 0; j <= 1000; ++j) {
            double x = i / 1000.0, y = j / 1000.0;
            REQUIRE(kl_bernoulli(x, y) >= 2.0 * (x - y) * (x - y) - 1e-12);
        }
    }
}

TEST_CASE("unnormalized relative entropy basics") {
    Vec w(2), u(2);
    w << 1.0, 2.0;
    u << 1.0, 2.0;
    CHECK(unnormalized_relative_entropy(w, u) ==
          Catch::Approx(0.0).margin(1e-14));
    u << 2.0, 1.0;
    CHECK(unnormalized_relative_entropy(w, u) > 0.0);
    // Matches the poisson divergence on the rates.
    PoissonProductState sw(w), su(u);
    CHECK(unnormalized_relative_entropy(w, u) ==
          Catch::Approx(kl_poisson_product(sw, su)).margin(1e-14));
}

TEST_CASE("bregman pairs: duality round trip") {
    CounterRng rng(3, 102);
    for (BregmanPair carrier :
         {BregmanPair::gaussian(1.7), BregmanPair::poisson()}) {
        for (int rep = 0; rep < 100; ++rep) {
            Vec theta = rng.normal_vec(3);
            Vec back = carrier.gradFstar(carrier.gradF(theta));
            REQUIRE((back - theta).norm() < 1e-9);
        }
    }
}

TEST_CASE("bregman divergence of the carriers matches the named divergence") {
    CounterRng rng(4, 103);
    BregmanPair poisson = BregmanPair::poisson();
    for (int rep = 0; rep < 50; ++rep) {
        Vec w = Vec::NullaryExpr(3, [&](int) { return rng.uniform(0.1, 4.0); });
        Vec u = Vec::NullaryExpr(3, [&](int) { return rng.uniform(0.1, 4.0); });
        CHECK(poisson.bregman_mean(w, u) ==
              Catch::Approx(unnormalized_relative_entropy(w, u)).margin(1e-10));
    }
    BregmanPair gauss = BregmanPair::gaussian(2.0);
    for (int rep = 0; rep < 50; ++rep) {
        Vec w = rng.normal_vec(3), u = rng.normal_vec(3);
        CHECK(gauss.bregman_mean(w, u) ==
              Catch::Approx((w - u).squaredNorm() / 4.0).margin(1e-10));
    }
}

TEST_CASE("gaussian mean projection is the constrained divergence minimizer") {
    // Oracle: the projected mean beats 1000 random feasible means in
    // kl(candidate || raw), with covariance shared.
    CounterRng rng(5, 104);
    const int d = 2;
    Mat a = Mat::NullaryExpr(d, d, [&](int, int) { return rng.normal(); });
    Mat cov = a * a.transpose() + 0.4 * Mat::Identity(d, d);
    for (const ConvexDomain& domain :
         {ConvexDomain::ball(0.6), ConvexDomain::centered_box(d, 0.5)}) {
        GaussianState raw(Vec::Constant(d, 2.0), cov);
        GaussianState projected = project_mean(raw, domain);
        REQUIRE(domain.contains(projected.mean(), 1e-8));
        double best = kl_gaussian(projected, raw);
        for (int i = 0; i < 1000; ++i) {
            Vec u = domain.kind() == ConvexDomain::Kind::Ball
                        ? rng.ball(d, 0.6)
                        : Vec(Vec::NullaryExpr(
                              d, [&](int) { return rng.uniform(-0.5, 0.5); }));
            GaussianState cand = raw.with_mean(u);
            REQUIRE(kl_gaussian(cand, raw) >= best - 1e-9);
        }
        // Covariance unchanged.
        REQUIRE((projected.covariance() - raw.covariance())
                    .cwiseAbs()
                    .maxCoeff() == 0.0);
    }
}

TEST_CASE("poisson mean projection clips onto the positive box") {
    PoissonProductState s(Vec::Constant(2, 5.0));
    ConvexDomain box = ConvexDomain::box(Vec::Constant(2, 0.5),
                                         Vec::Constant(2, 2.0));
    auto out = project_mean(s, box);
    CHECK((out.rates().array() == 2.0).all());
    CHECK_THROWS(project_mean(s, ConvexDomain::ball(1.0)));
}

TEST_CASE("beta mean projection clips the mean, keeps the total count") {
    BetaState s(6.0, 2.0);  // mean 0.75
    ConvexDomain iv = ConvexDomain::interval(0.0, 0.5);
    BetaState out = project_mean(s, iv);
    CHECK(out.mean() == Catch::Approx(0.5).margin(1e-12));
    CHECK(out.shape_a() + out.shape_b() == Catch::Approx(8.0).margin(1e-12));
    // No-op when feasible.
    BetaState same = project_mean(BetaState(1.0, 3.0), iv);
    CHECK(same.mean() == Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("beta symmetric support maps the mean onto [-1, 1]") {
    BetaState s(0.5, 0.5, BetaState::Support::Symmetric);
    CHECK(s.mean() == Catch::Approx(0.0).margin(1e-14));
    BetaState t(3.0, 1.0, BetaState::Support::Symmetric);
    CHECK(t.mean() == Catch::Approx(0.5).margin(1e-14));
    // One-sided clip to nonnegative means.
    BetaState neg(1.0, 3.0, BetaState::Support::Symmetric);
    BetaState clipped = project_mean(neg, ConvexDomain::interval(0.0, 1.0));
    CHECK(clipped.mean() == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("discrete atoms validate and project trivially") {
    CHECK_THROWS(DiscreteAtoms({Vec::Ones(1)}, Vec::Constant(1, 2.0)));
    DiscreteAtoms d = DiscreteAtoms::signed_basis(3, 2.0);
    CHECK(d.size() == 6);
    CHECK(d.mean().norm() == Catch::Approx(0.0).margin(1e-14));
    // Identity when the mean is feasible, error when the constraint binds.
    CHECK_NOTHROW(project_mean(d, ConvexDomain::ball(0.5)));
    Vec w(6);
    w << 0.9, 0.02, 0.02, 0.02, 0.02, 0.02;
    DiscreteAtoms skew = d.with_weights(w);
    CHECK_THROWS(project_mean(skew, ConvexDomain::ball(0.5)));
}
