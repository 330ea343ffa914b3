#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "mtsdvgan/data/prepare.hpp"
#include "mtsdvgan/data/preprocess.hpp"
#include "mtsdvgan/data/series.hpp"
#include "mtsdvgan/data/synth.hpp"
#include "mtsdvgan/data/windows.hpp"
#include "mtsdvgan/error.hpp"

using namespace mtsdvgan;
using namespace mtsdvgan::data;

namespace {

RawSeries parse(const std::string& text, bool labels) {
    std::istringstream in(text);
    return parse_csv(in, labels, "test.csv");
}

RawSeries series_of(const Eigen::MatrixXd& v) {
    RawSeries s;
    s.values = v;
    for (Eigen::Index j = 0; j < v.cols(); ++j) s.feature_names.push_back("f" + std::to_string(j));
    return s;
}

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& g) {
    std::normal_distribution<double> n(0, 1);
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(g);
    return m;
}

}  // namespace

TEST_CASE("csv parsing") {
    SUBCASE("labels are split off") {
        auto s = parse("a,b,label\n1,2,0\n3,4,1\n5,6,0\n", true);
        CHECK(s.length() == 3);
        CHECK(s.features() == 2);
        REQUIRE(s.labels);
        CHECK(s.labels->size() == 3);
        CHECK((*s.labels)[1] == 1);
        CHECK(s.values(2, 1) == 6.0);
        CHECK(s.feature_names == std::vector<std::string>{"a", "b"});
    }
    SUBCASE("label column excluded even when labels are not requested") {
        auto s = parse("a,label,b\n1,0,2\n", false);
        CHECK(s.features() == 2);
        CHECK(!s.labels);
        CHECK(s.values(0, 1) == 2.0);
    }
    SUBCASE("NaN rejected") { CHECK_THROWS_AS(parse("a,b\n1,NaN\n", false), ValidationError); }
    SUBCASE("infinite rejected") { CHECK_THROWS_AS(parse("a,b\n1,inf\n", false), ValidationError); }
    SUBCASE("non-numeric rejected") { CHECK_THROWS_AS(parse("a,b\n1,x\n", false), ValidationError); }
    SUBCASE("label outside {0,1} names the row") {
        try {
            parse("a,label\n1,0\n2,1\n3,2\n", true);
            FAIL("expected an error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("row 3") != std::string::npos);
        }
    }
    SUBCASE("missing label column") { CHECK_THROWS_AS(parse("a,b\n1,2\n", true), ValidationError); }
    SUBCASE("empty body") { CHECK_THROWS_AS(parse("a,b\n", false), ValidationError); }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_csv("/nonexistent/x.csv", false), ValidationError); }
    SUBCASE("write then read round-trips exactly") {
        std::mt19937_64 g(3);
        auto s = series_of(random_matrix(7, 3, g));
        s.labels = Labels{0, 1, 0, 0, 1, 1, 0};
        std::ostringstream out;
        write_csv(out, s);
        auto back = parse(out.str(), true);
        CHECK(back.values == s.values);
        CHECK(*back.labels == *s.labels);
    }
}

TEST_CASE("normalizer") {
    SUBCASE("0, max/2, max map to -1, 0, 1") {
        Eigen::MatrixXd v(3, 1);
        v << 0, 4, 8;
        auto st = fit_normalizer(series_of(v));
        auto out = apply_normalizer(st, series_of(v));
        CHECK(out.values(0, 0) == -1.0);
        CHECK(out.values(1, 0) == 0.0);
        CHECK(out.values(2, 0) == 1.0);
    }
    SUBCASE("column equal to its max maps to 1") {
        Eigen::MatrixXd v = Eigen::MatrixXd::Constant(4, 2, 3.5);
        auto out = apply_normalizer(fit_normalizer(series_of(v)), series_of(v));
        CHECK((out.values.array() == 1.0).all());
    }
    SUBCASE("zero column is degenerate") {
        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(3, 2);
        v(1, 0) = 1;
        CHECK_THROWS_AS(fit_normalizer(series_of(v)), DegenerateColumn);
    }
    SUBCASE("training column maxima are exactly 1 and test data is not clipped") {
        std::mt19937_64 g(5);
        Eigen::MatrixXd v = random_matrix(50, 4, g).array().abs() * 7.3 + 0.1;
        auto st = fit_normalizer(series_of(v));
        auto out = apply_normalizer(st, series_of(v));
        for (Eigen::Index j = 0; j < 4; ++j) CHECK(out.values.col(j).maxCoeff() == 1.0);
        Eigen::MatrixXd big = v * 2;
        CHECK(apply_normalizer(st, series_of(big)).values.maxCoeff() > 1.0);
    }
}

TEST_CASE("pca") {
    SUBCASE("points on a line through the origin") {
        Eigen::MatrixXd v(5, 3);
        for (int t = 0; t < 5; ++t) v.row(t) = (t - 2.0) * Eigen::RowVector3d(1, 2, -2);
        auto p = fit_pca(series_of(v), 1);
        const double total = (v.rowwise() - v.colwise().mean()).squaredNorm() / 4.0;
        CHECK(p.explained_variance(0) == doctest::Approx(total).epsilon(1e-12));
    }
    SUBCASE("closed-form diagonal covariance") {
        // Four points with sample covariance exactly diag(2, 1).
        Eigen::MatrixXd v(4, 2);
        const double s = std::sqrt(3.0), t = std::sqrt(1.5);
        v << s, 0, -s, 0, 0, t, 0, -t;
        auto p = fit_pca(series_of(v), 2);
        CHECK(p.explained_variance(0) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(p.explained_variance(1) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(p.components(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(p.components(0, 1)) < 1e-12);
    }
    SUBCASE("component count outside [1, N]") {
        std::mt19937_64 g(1);
        auto s = series_of(random_matrix(10, 3, g));
        CHECK_THROWS_AS(fit_pca(s, 4), ValidationError);
        CHECK_THROWS_AS(fit_pca(s, 0), ValidationError);
    }
    SUBCASE("rank-deficient input is padded with an orthonormal residual basis") {
        Eigen::MatrixXd v(6, 4);
        for (int t = 0; t < 6; ++t) v.row(t) = (t * 0.5) * Eigen::RowVector4d(1, 0, 1, 0);
        auto p = fit_pca(series_of(v), 3);
        CHECK(p.components.rows() == 3);
        CHECK((p.components * p.components.transpose() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(p.explained_variance(1) == 0.0);
        CHECK(p.explained_variance(2) == 0.0);
    }
    SUBCASE("reduce(reconstruct(reduce(x))) == reduce(x)") {
        std::mt19937_64 g(2);
        auto s = series_of(random_matrix(40, 6, g));
        auto p = fit_pca(s, 3);
        const auto r = apply_pca(p, s.values);
        const auto r2 = apply_pca(p, reconstruct_pca(p, r));
        CHECK((r - r2).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("state archive round trip") {
        std::mt19937_64 g(4);
        Eigen::MatrixXd v = random_matrix(30, 4, g).array().abs() + 0.5;
        PreprocessState st;
        st.normalizer = fit_normalizer(series_of(v));
        st.pca = fit_pca(apply_normalizer(st.normalizer, series_of(v)), 2);
        st.feature_names = {"a", "b", "c", "d"};
        auto back = PreprocessState::from_archive(TensorArchive::deserialize(st.to_archive().serialize()));
        CHECK(back.feature_names == st.feature_names);
        CHECK((back.pca.components - st.pca.components).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((back.normalizer.per_feature_max - st.normalizer.per_feature_max).cwiseAbs().maxCoeff() <
              1e-6 * st.normalizer.per_feature_max.maxCoeff());
    }
}

TEST_CASE("windows") {
    SUBCASE("counts") {
        CHECK(make_windows(Eigen::MatrixXd::Zero(100, 2), std::nullopt, 30, 10).size() == 8);
        CHECK(make_windows(Eigen::MatrixXd::Zero(30, 2), std::nullopt, 30, 10).size() == 1);
        CHECK_THROWS_AS(make_windows(Eigen::MatrixXd::Zero(29, 2), std::nullopt, 30, 10), EmptyWindowSet);
        CHECK_THROWS_AS(make_windows(Eigen::MatrixXd::Zero(29, 2), std::nullopt, 0, 10), ValidationError);
    }
    SUBCASE("coverage, stride and labels") {
        Eigen::MatrixXd v(12, 1);
        for (int t = 0; t < 12; ++t) v(t, 0) = t;
        Labels l(12, 0);
        l[7] = 1;
        auto w = make_windows(v, l, 4, 3);
        REQUIRE(w.size() == 3);
        CHECK(w.start_indices == std::vector<std::int64_t>{0, 3, 6});
        CHECK(w.windows[1](0, 0) == 3.0);
        CHECK(w.windows[2](3, 0) == 9.0);
        CHECK(*w.window_labels == Labels{0, 0, 1});
    }
    SUBCASE("shift = k tiles the series exactly") {
        std::mt19937_64 g(8);
        Eigen::MatrixXd v = random_matrix(20, 3, g);
        auto w = make_windows(v, std::nullopt, 5, 5);
        Eigen::MatrixXd back(20, 3);
        for (std::size_t i = 0; i < w.size(); ++i) back.middleRows(static_cast<Eigen::Index>(i) * 5, 5) = w.windows[i];
        CHECK(back == v);
    }
    SUBCASE("archive round trip") {
        Eigen::MatrixXd v = Eigen::VectorXd::LinSpaced(20, 0, 19).replicate(1, 2);
        Labels l(20, 0);
        l[15] = 1;
        auto w = make_windows(v, l, 5, 2);
        auto back = WindowSet::from_archive(TensorArchive::deserialize(w.to_archive().serialize()));
        CHECK(back.size() == w.size());
        CHECK(back.start_indices == w.start_indices);
        CHECK(*back.window_labels == *w.window_labels);
        CHECK(back.windows[3] == w.windows[3]);
    }
}

TEST_CASE("jitter and scale") {
    std::mt19937_64 g(6);
    std::vector<Eigen::MatrixXd> batch{random_matrix(5, 2, g), random_matrix(5, 2, g)};
    SUBCASE("zero sigmas give the identity") {
        auto out = jitter_scale(batch, 0, 0, 1);
        CHECK(out[0] == batch[0]);
        CHECK(out[1] == batch[1]);
    }
    SUBCASE("deterministic per seed") {
        auto a = jitter_scale(batch, 0.1, 0.1, 42), b = jitter_scale(batch, 0.1, 0.1, 42);
        CHECK(a[0] == b[0]);
        CHECK(a[1] == b[1]);
        CHECK(jitter_scale(batch, 0.1, 0.1, 43)[0] != a[0]);
    }
    SUBCASE("negative sigma") { CHECK_THROWS_AS(jitter_scale(batch, -0.1, 0, 1), ValidationError); }
    SUBCASE("jitter mean over 1e5 draws") {
        std::vector<Eigen::MatrixXd> one{Eigen::MatrixXd::Constant(2, 2, 0.7)};
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(2, 2);
        const int draws = 100000;
        for (int i = 0; i < draws; ++i) sum += jitter_scale(one, 0.1, 0.0, static_cast<std::uint64_t>(i))[0] - one[0];
        CHECK((sum / draws).cwiseAbs().maxCoeff() < 0.005);
    }
}

TEST_CASE("synthetic generator") {
    SUBCASE("deterministic") {
        SynthConfig c;
        c.length = 3000;
        auto a = synth_generate(c), b = synth_generate(c);
        CHECK(a.values == b.values);
        CHECK(*a.labels == *b.labels);
    }
    SUBCASE("labeled fraction tracks anomaly_rate") {
        for (double rate : {0.02, 0.05, 0.1, 0.3}) {
            for (std::uint64_t seed : {0u, 1u, 2u}) {
                SynthConfig c;
                c.length = 20000;
                c.anomaly_rate = rate;
                c.seed = seed;
                c.anomaly_kinds = {AnomalyKind::spike, AnomalyKind::level_shift, AnomalyKind::correlation_break};
                auto s = synth_generate(c);
                double pos = 0;
                for (auto v : *s.labels) pos += v;
                CHECK(std::abs(pos / 20000 / rate - 1) <= 0.2);
            }
        }
    }
    SUBCASE("invalid configs") {
        SynthConfig c;
        c.anomaly_rate = 0.5;
        CHECK_THROWS_AS(synth_generate(c), ValidationError);
        c.anomaly_rate = 0;
        CHECK_THROWS_AS(synth_generate(c), ValidationError);
        c.anomaly_rate = 0.05;
        c.anomaly_kinds.clear();
        CHECK_THROWS_AS(synth_generate(c), ValidationError);
    }
    SUBCASE("anomalous rows deviate from the normal regime") {
        SynthConfig c;
        c.length = 8000;
        auto s = synth_generate(c);
        CHECK(s.values.allFinite());
        CHECK(s.features() == 8);
    }
}

TEST_CASE("prepare") {
    SynthConfig c;
    c.length = 4000;
    auto s = synth_generate(c);
    auto p = prepare(s.slice(0, 2000), s.slice(2000, 4000), PrepareOptions{5, 30, 10, 0.2});
    CHECK(p.train.feature_dim() == 5);
    CHECK(!p.train.window_labels);
    CHECK(p.eval->window_labels);
    CHECK(p.eval->size() == static_cast<std::size_t>(window_count(2000, 30, 10)));
    CHECK(p.reference.size() == static_cast<std::size_t>(std::llround(0.2 * (p.train.size() + p.reference.size()))));
    CHECK(p.train.start_indices.back() < p.reference.start_indices.front());
}
