#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "mtsdvgan/error.hpp"
#include "mtsdvgan/eval/detect.hpp"
#include "mtsdvgan/eval/metrics.hpp"
#include "mtsdvgan/eval/scoring.hpp"
#include "mtsdvgan/eval/stats.hpp"

using namespace mtsdvgan;
using namespace mtsdvgan::eval;
using data::Labels;

namespace {

std::mt19937_64 rng(42);

std::vector<double> uniform(std::size_t n, double lo = 0, double hi = 1) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

Labels bernoulli(std::size_t n, double p) {
    std::bernoulli_distribution b(p);
    Labels l(n);
    for (auto& x : l) x = b(rng);
    return l;
}

Labels both_classes(std::size_t n, double p) {
    for (;;) {
        auto l = bernoulli(n, p);
        const auto pos = std::count(l.begin(), l.end(), 1);
        if (pos > 0 && pos < static_cast<long>(n)) return l;
    }
}

}  // namespace

TEST_CASE("recon_loss and disc_score") {
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 3);
    CHECK(recon_loss(x, x) == 0.0);
    CHECK(recon_loss(x, (x.array() + 1).matrix()) == doctest::Approx(1.0).epsilon(1e-14));
    Eigen::MatrixXd a(1, 2), b(1, 2);
    a << 0, 0;
    b << 3, 4;
    CHECK(recon_loss(a, b) == 12.5);
    CHECK_THROWS_AS(recon_loss(a, x), ValidationError);

    const double e = 1e-6;
    CHECK(disc_score(1 - e, e) == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(disc_score(1.0, e) <= 1.1e-6);
    CHECK(disc_score(e, e) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(disc_score(0.5, e) == 0.5);
}

TEST_CASE("normalize_scores") {
    CHECK(normalize_scores({0, 10}, {5}, "l_r") == std::vector<double>{0.5});
    CHECK(normalize_scores({0, 10}, {-3}, "l_r") == std::vector<double>{0.0});
    CHECK(normalize_scores({0, 10}, {10}, "l_r") == std::vector<double>{1.0});
    CHECK(normalize_scores({0, 10}, {17}, "l_r") == std::vector<double>{1.0});
    try {
        normalize_scores({2, 2, 2}, {1}, "l_d");
        FAIL("expected an error");
    } catch (const ValidationError& err) {
        CHECK(std::string(err.what()).find("l_d") != std::string::npos);
    }
    CHECK_THROWS_AS(normalize_scores({}, {1}, "l_r"), ValidationError);
}

TEST_CASE("rd_score") {
    CHECK(rd_score(0.2, 0.4, 0.0) == 0.4);
    CHECK(rd_score(0.2, 0.4, 1.0) == 0.2);
    CHECK(rd_score(0.2, 0.4, 0.5) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK_THROWS_AS(rd_score(0.2, 0.4, 1.01), ValidationError);
    CHECK_THROWS_AS(rd_score(0.2, 0.4, -0.01), ValidationError);
    CHECK_THROWS_AS(rd_score(std::vector<double>{1, 2}, std::vector<double>{1}, 0.5), ValidationError);

    const auto grid = lambda_grid();
    REQUIRE(grid.size() == 101);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 1.0);
    CHECK(grid[37] == 0.37);
    for (int i = 0; i < 10000; ++i) {
        const auto v = uniform(3);
        const double lam = grid[static_cast<std::size_t>(i % 101)] * v[2] / v[2];
        CHECK(rd_score(v[0], v[1], lam) - (lam * v[0] + (1 - lam) * v[1]) == 0.0);
    }
    const auto ld = uniform(50), lr = uniform(50);
    CHECK(rd_score(ld, lr, 0.0) == lr);
    CHECK(rd_score(ld, lr, 1.0) == ld);
}

TEST_CASE("confusion_metrics") {
    auto m = confusion_metrics(1, 1, 0, 0);
    CHECK(m.precision == 50.0);
    CHECK(m.recall == 100.0);
    CHECK(m.accuracy == 50.0);
    CHECK(m.f1 == doctest::Approx(66.6667).epsilon(1e-6));
    m = confusion_metrics(5, 0, 0, 7);
    CHECK(m.precision == 100.0);
    CHECK(m.recall == 100.0);
    CHECK(m.accuracy == 100.0);
    CHECK(m.f1 == 100.0);
    m = confusion_metrics(0, 3, 2, 1);
    CHECK(m.recall == 0.0);
    CHECK(m.f1 == 0.0);
    CHECK(m.f1_degenerate);
    m = confusion_metrics(0, 0, 2, 1);
    CHECK(m.precision == 0.0);
    CHECK(m.precision_degenerate);
    CHECK(!m.recall_degenerate);
    CHECK(m.total() == 3);
    CHECK_THROWS_AS(confusion_metrics(0, 0, 0, 0), ValidationError);
    CHECK_THROWS_AS(confusion_metrics(-1, 0, 1, 0), ValidationError);

    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        const auto labels = bernoulli(n, 0.3);
        const auto scores = uniform(n);
        const double t = uniform(1)[0];
        const auto r = evaluate_threshold(scores, labels, t);
        Labels pred(n);
        for (std::size_t i = 0; i < n; ++i) pred[i] = scores[i] > t;
        const auto c = oracle::count(pred, labels);
        CHECK(r.tp == c.tp);
        CHECK(r.fp == c.fp);
        CHECK(r.fn == c.fn);
        CHECK(r.tn == c.tn);
        const auto pc = oracle::percentages(c);
        CHECK(r.precision == pc.precision);
        CHECK(r.recall == pc.recall);
        CHECK(r.accuracy == pc.accuracy);
        CHECK(r.f1 == pc.f1);
    }
}

TEST_CASE("select_threshold") {
    const Labels l{0, 0, 1, 1};
    auto r = select_threshold({0.1, 0.2, 0.8, 0.9}, l);
    CHECK(r.f1 == 100.0);
    CHECK(r.threshold > 0.2);
    CHECK(r.threshold < 0.8);
    CHECK(r.tp == 2);
    CHECK(r.fp == 0);

    // Constant scores: only all-positive or all-negative predictions exist.
    r = select_threshold({0.3, 0.3, 0.3, 0.3, 0.3}, Labels{0, 1, 0, 0, 1});
    CHECK(r.f1 == doctest::Approx(100.0 * 4 / 7));
    CHECK(r.tp == 2);

    CHECK_THROWS_AS(select_threshold({0.1, 0.2}, Labels{1, 1}), ValidationError);
    CHECK_THROWS_AS(select_threshold({0.1, 0.2}, Labels{0, 0}), ValidationError);
    CHECK_THROWS_AS(select_threshold({0.1, 0.2}, Labels{0}), ValidationError);

    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 300;
        const auto labels = both_classes(n, 0.2);
        auto scores = uniform(n);
        if (trial % 3 == 0)
            for (auto& s : scores) s = std::round(s * 10) / 10;  // many ties
        const auto best = select_threshold(scores, labels);
        const auto f1_of = [](const oracle::Counts& c) { return oracle::percentages(c).f1; };
        CHECK(best.f1 >= oracle::exhaustive_best_f1(scores, labels, f1_of));
        CHECK(best.f1 == evaluate_threshold(scores, labels, best.threshold).f1);
    }
}

TEST_CASE("threshold_candidates") {
    auto c = threshold_candidates({0.5, 0.1, 0.5, 0.3});
    REQUIRE(c.size() == 4);
    CHECK(c[0] < 0.1);
    CHECK(c[1] == doctest::Approx(0.2));
    CHECK(c[2] == doctest::Approx(0.4));
    CHECK(c[3] == 0.5);
    auto big = threshold_candidates(uniform(20000));
    CHECK(big.size() <= 514);
    CHECK(std::is_sorted(big.begin(), big.end()));
}

TEST_CASE("sweep_lambda") {
    const std::size_t n = 60;
    const auto labels = both_classes(n, 0.25);
    std::vector<double> separating(n), constant(n, 0.4);
    for (std::size_t i = 0; i < n; ++i) separating[i] = labels[i] ? 0.6 + 0.4 * uniform(1)[0] : 0.5 * uniform(1)[0];
    auto a = sweep_lambda(constant, separating, labels);
    CHECK(a.lambda == 0.0);
    CHECK(a.f1 == 100.0);
    // Any lambda > 0 already orders windows by l_d, so the smallest such grid
    // point wins the tie.
    auto b = sweep_lambda(separating, constant, labels);
    CHECK(b.lambda == 0.01);
    CHECK(b.f1 == 100.0);
    CHECK(select_threshold(rd_score(separating, constant, 1.0), labels).f1 == 100.0);

    const auto ld = uniform(n), lr = uniform(n);
    const auto c = sweep_lambda(ld, lr, labels);
    for (double lam : lambda_grid()) CHECK(c.f1 >= select_threshold(rd_score(ld, lr, lam), labels).f1);
    CHECK(c.metrics.f1 == c.f1);
    CHECK_THROWS_AS(sweep_lambda(ld, std::vector<double>(n - 1), labels), ValidationError);
}

TEST_CASE("roc_auc") {
    CHECK(roc_auc({0.1, 0.2, 0.8, 0.9}, Labels{0, 0, 1, 1}).auc == 1.0);
    CHECK(roc_auc({-0.1, -0.2, -0.8, -0.9}, Labels{0, 0, 1, 1}).auc == 0.0);
    CHECK(roc_auc({0.5, 0.5}, Labels{0, 1}).auc == 0.5);
    const auto r = roc_auc({0.1, 0.4, 0.35, 0.8}, Labels{0, 0, 1, 1});
    CHECK(r.auc == 0.75);
    CHECK(r.points.front().fpr == 0.0);
    CHECK(r.points.front().tpr == 0.0);
    CHECK(r.points.back().fpr == 1.0);
    CHECK(r.points.back().tpr == 1.0);
    CHECK_THROWS_AS(roc_auc({0.1, 0.2}, Labels{1, 1}), ValidationError);

    const auto scores = uniform(10000);
    CHECK(std::abs(roc_auc(scores, both_classes(10000, 0.3)).auc - 0.5) < 0.02);

    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 999;
        const auto labels = both_classes(n, 0.3);
        auto s = uniform(n);
        if (trial % 2)
            for (auto& x : s) x = std::floor(x * 20);
        CHECK(std::abs(roc_auc(s, labels).auc - oracle::pairwise_auc(s, labels)) <= 1e-12);
    }
}

TEST_CASE("monotone transforms leave AUC and best F1 unchanged") {
    const std::size_t n = 300;
    const auto labels = both_classes(n, 0.2);
    const auto s = uniform(n);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = std::exp(3 * s[i]) - 7;
    CHECK(roc_auc(s, labels).auc == roc_auc(t, labels).auc);
    CHECK(select_threshold(s, labels).f1 == select_threshold(t, labels).f1);
}

TEST_CASE("friedman_ranks") {
    Eigen::MatrixXd tie = Eigen::MatrixXd::Constant(1, 4, 3.0);
    CHECK(friedman_ranks(tie).ranks == Eigen::MatrixXd::Constant(1, 4, 2.5));

    Eigen::MatrixXd dom(3, 2);
    dom << 0.9, 0.1, 0.8, 0.7, 0.5, 0.4;
    auto d = friedman_ranks(dom);
    CHECK(d.average(0) == 1.0);
    CHECK(d.average(1) == 2.0);
    CHECK(friedman_ranks(dom, false).average(0) == 2.0);

    Eigen::MatrixXd one(1, 3);
    one << 0.2, 0.9, 0.5;
    const auto o = friedman_ranks(one);
    CHECK(o.average == o.ranks.row(0).transpose());

    // Rows sum to k (k + 1) / 2 and match the counting oracle.
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Random(3, 7);
        if (trial % 2) m = (m.array() * 3).round().matrix();
        const auto r = friedman_ranks(m);
        CHECK(r.ranks == oracle::ranks(m));
        for (Eigen::Index i = 0; i < 3; ++i) CHECK(r.ranks.row(i).sum() == doctest::Approx(28.0));
    }
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
    bad(0, 1) = NAN;
    CHECK_THROWS_AS(friedman_ranks(bad), ValidationError);
}

TEST_CASE("published rank table") {
    // Columns: MTS-DVGAN, ADtrans, USAD, MAD-GAN, GAN-AD, EGAN, AE, OCSVM, IF, FB, KNN, PCA.
    Eigen::MatrixXd f1(3, 12);
    f1 << 79.87, 78.93, 73.17, 22.11, 75.48, 50.68, 61.43, 47.23, 47.02, 10.17, 7.83, 22.96,  //
        97.84, 95.79, 26.29, 92.52, 73.91, 17.43, 34.35, 16.66, 17.45, 8.60, 7.75, 9.86,      //
        93.78, 91.93, 79.15, 76.53, 66.43, 93.87, 55.48, 55.37, 55.95, 29.04, 25.26, 45.43;
    Eigen::MatrixXd order(3, 12);
    order << 1, 2, 4, 10, 3, 6, 5, 7, 8, 11, 12, 9,  //
        1, 2, 6, 3, 4, 8, 5, 9, 7, 11, 12, 10,       //
        2, 3, 4, 5, 6, 1, 8, 9, 7, 11, 12, 10;
    const double published[12] = {1.33, 2.33, 4.67, 6, 4.33, 5, 6, 8.33, 7.33, 11, 12, 9.67};
    const auto from_f1 = friedman_ranks(f1);
    const auto from_order = friedman_ranks(order, false);
    CHECK(from_f1.ranks == order);
    for (int j = 0; j < 12; ++j) {
        CHECK(std::abs(from_f1.average(j) - published[j]) < 0.01);
        CHECK(std::abs(from_order.average(j) - published[j]) < 0.01);
    }
}

TEST_CASE("nemenyi") {
    CHECK(nemenyi_q(6, 0.05) == doctest::Approx(2.850).epsilon(1e-4));
    CHECK(std::abs(nemenyi_cd(6, 3, 0.05) - 4.354) < 1e-3);
    CHECK(nemenyi_cd(2, 1, 0.05) == doctest::Approx(1.960).epsilon(1e-4));
    double prev = 1e9;
    for (int n = 1; n <= 1 << 20; n *= 2) {
        const double cd = nemenyi_cd(6, n, 0.05);
        CHECK(cd < prev);
        prev = cd;
    }
    CHECK(prev < 0.01);
    CHECK_THROWS_AS(nemenyi_q(21, 0.05), ValidationError);
    CHECK_THROWS_AS(nemenyi_q(1, 0.05), ValidationError);
    CHECK_THROWS_AS(nemenyi_q(5, 0.01), ValidationError);
    CHECK_THROWS_AS(nemenyi_cd(5, 0, 0.05), ValidationError);

    // Every table entry against the studentized range quantile by quadrature.
    for (double alpha : {0.05, 0.10})
        for (int k = 2; k <= 20; ++k) {
            INFO("k=", k, " alpha=", alpha);
            CHECK(std::abs(nemenyi_q(k, alpha) - oracle::nemenyi_q(k, alpha)) < 2e-3);
        }
}

namespace {

data::WindowSet windows(std::size_t n, Eigen::Index k, Eigen::Index d, std::optional<Labels> labels = {}) {
    data::WindowSet w;
    w.window_length = k;
    w.shift = 1;
    for (std::size_t i = 0; i < n; ++i) {
        w.windows.push_back(Eigen::MatrixXd::Random(k, d) * 0.5);
        w.start_indices.push_back(static_cast<std::int64_t>(i));
    }
    w.window_labels = labels;
    return w;
}

nn::ModelShape shape(bool encoder = true) {
    nn::ModelShape s;
    s.features = 3;
    s.window = 6;
    s.hidden = 4;
    s.depth = 1;
    s.latent = 2;
    s.feature_dim = 4;
    s.has_encoder = encoder;
    return s;
}

}  // namespace

TEST_CASE("score_windows") {
    SUBCASE("zero-initialized model gives l_d = 0.5") {
        const auto r = score_windows(nn::Model<float>::zeros(shape()), windows(7, 6, 3));
        REQUIRE(r.l_d.size() == 7);
        for (double v : r.l_d) CHECK(v == 0.5);
        for (double v : r.l_r) CHECK(v >= 0.0);
    }
    SUBCASE("chunking changes the scores only by rounding") {
        const auto m = nn::init_model<float>(shape(), 0.3, 1);
        const auto w = windows(9, 6, 3);
        ScoringOptions a, b;
        a.chunk = 2;
        b.chunk = 100;
        const auto ra = score_windows(m, w, a), rb = score_windows(m, w, b);
        for (std::size_t i = 0; i < w.size(); ++i) {
            CHECK(ra.l_r[i] == doctest::Approx(rb.l_r[i]).epsilon(1e-5));
            CHECK(ra.l_d[i] == doctest::Approx(rb.l_d[i]).epsilon(1e-5));
        }
    }
    SUBCASE("latent inversion lowers the reconstruction error") {
        const auto m = nn::init_model<float>(shape(false), 0.3, 2);
        const auto w = windows(5, 6, 3);
        ScoringOptions none, some;
        none.inversion_steps = 0;
        some.inversion_steps = 50;
        const auto r0 = score_windows(m, w, none), r1 = score_windows(m, w, some);
        for (std::size_t i = 0; i < 5; ++i) CHECK(r1.l_r[i] <= r0.l_r[i]);
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(score_windows(nn::Model<float>::zeros(shape()), windows(3, 5, 3)), ValidationError);
    }
}

TEST_CASE("detect") {
    const auto m = nn::init_model<float>(shape(), 0.3, 3);
    Labels l(40, 0);
    for (std::size_t i = 30; i < 40; ++i) l[i] = 1;
    auto eval_set = windows(40, 6, 3, l);
    for (std::size_t i = 30; i < 40; ++i) eval_set.windows[i].array() += 2.0;
    const auto ref = windows(20, 6, 3);

    SUBCASE("auto lambda and threshold") {
        const auto r = detect(m, eval_set, ref, {});
        CHECK(r.lambda_auto);
        CHECK(r.threshold_auto);
        CHECK(std::round(r.lambda * 100) / 100 == r.lambda);
        REQUIRE(r.metrics.has_value());
        REQUIRE(r.roc.has_value());
        CHECK(r.metrics->auc.has_value());
        CHECK(r.metrics->total() == 40);
        CHECK(r.rd.size() == 40);
        double norm = 0, anom = 0;
        for (std::size_t i = 0; i < 40; ++i) (l[i] ? anom : norm) += r.rd[i];
        CHECK(anom / 10 > norm / 30);
    }
    SUBCASE("lambda 0 gives the reconstruction channel") {
        DetectOptions o;
        o.lambda = 0.0;
        const auto r = detect(m, eval_set, ref, o);
        CHECK(r.rd == r.l_r);
        CHECK(!r.lambda_auto);
    }
    SUBCASE("fixed threshold") {
        DetectOptions o;
        o.lambda = 0.5;
        o.threshold = 0.25;
        const auto r = detect(m, eval_set, ref, o);
        CHECK(r.threshold == 0.25);
        CHECK(r.metrics->threshold == 0.25);
    }
    SUBCASE("auto requires labels") {
        auto unlabeled = eval_set;
        unlabeled.window_labels.reset();
        CHECK_THROWS_AS(detect(m, unlabeled, ref, {}), ValidationError);
        DetectOptions o;
        o.lambda = 0.3;
        o.threshold = 0.5;
        const auto r = detect(m, unlabeled, ref, o);
        CHECK(!r.metrics.has_value());
        CHECK(!r.roc.has_value());
    }
    SUBCASE("report files") {
        const auto r = detect(m, eval_set, ref, {});
        const auto dir = std::filesystem::temp_directory_path() / "mtsdvgan_test_detect";
        std::filesystem::create_directories(dir);
        write_metrics_json(dir / "m.json", r);
        write_roc_csv(dir / "roc.csv", *r.roc);
        write_scores_csv(dir / "s.csv", r);
        CHECK(metrics_json(r) == metrics_json(r));
        const auto j = nlohmann::json::parse(std::ifstream(dir / "m.json"));
        CHECK(j.contains("format_version"));
        CHECK(j["f1"].get<double>() == r.metrics->f1);
        CHECK(j["lambda"].get<double>() == r.lambda);
        std::ifstream roc(dir / "roc.csv"), sc(dir / "s.csv");
        std::string h1, h2;
        std::getline(roc, h1);
        std::getline(sc, h2);
        CHECK(h1 == "fpr,tpr,threshold");
        CHECK(h2 == "start_index,l_r,l_d,rd,label");
        std::filesystem::remove_all(dir);
    }
}
