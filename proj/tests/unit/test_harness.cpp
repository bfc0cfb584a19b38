#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <json.hpp>

#include "edgereplay/common/error.hpp"
#include "edgereplay/common/rng.hpp"
#include "edgereplay/harness/classifier.hpp"
#include "edgereplay/harness/config.hpp"
#include "edgereplay/harness/dataset.hpp"
#include "edgereplay/harness/features.hpp"
#include "edgereplay/harness/phase_plan.hpp"
#include "edgereplay/harness/sampling.hpp"
#include "edgereplay/imaging/canny.hpp"
#include "oracles.hpp"

using namespace edgereplay;
using namespace edgereplay::harness;
using nlohmann::json;

namespace {

// Fraction of points sampled every half pixel along the polygon that have an
// edge pixel within `tol`.
double outline_recall(const imaging::BitEdgeMap& e, const PolygonGeometry& g, double tol = 2.0) {
  const auto v = g.vertices();
  int hit = 0, total = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto a = v[i], b = v[(i + 1) % v.size()];
    const int n = std::max(2, static_cast<int>(std::ceil(2 * std::hypot(b[0] - a[0], b[1] - a[1]))));
    for (int k = 0; k < n; ++k) {
      const double t = (k + 0.5) / n;
      const double y = a[0] + t * (b[0] - a[0]), x = a[1] + t * (b[1] - a[1]);
      bool found = false;
      for (int yy = static_cast<int>(std::floor(y - tol)); yy <= static_cast<int>(std::ceil(y + tol)) && !found; ++yy)
        for (int xx = static_cast<int>(std::floor(x - tol)); xx <= static_cast<int>(std::ceil(x + tol)) && !found; ++xx)
          found = yy >= 0 && xx >= 0 && yy < e.height() && xx < e.width() && std::hypot(yy - y, xx - x) <= tol &&
                  e.get(yy, xx);
      ++total;
      hit += found;
    }
  }
  return static_cast<double>(hit) / total;
}

std::vector<Example> examples_of(const std::vector<std::vector<double>>& xs, const std::vector<int>& ys) {
  std::vector<Example> out;
  for (std::size_t i = 0; i < xs.size(); ++i) out.push_back({xs[i], ys[i]});
  return out;
}

double max_rel_error(const Gradient& a, const Gradient& b) {
  double worst = 0;
  auto cmp = [&](const std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i)
      worst = std::max(worst, std::abs(x[i] - y[i]) / std::max(1e-8, std::abs(x[i]) + std::abs(y[i])));
  };
  cmp(a.weights, b.weights);
  cmp(a.bias, b.bias);
  return worst;
}

}  // namespace

TEST_CASE("phase plans follow the split rules") {
  CHECK(make_phase_plan(100, 5, Protocol::lfs, 1).sizes() == std::vector<std::size_t>{20, 20, 20, 20, 20});
  CHECK(make_phase_plan(256, 10, Protocol::lfh, 1).sizes() ==
        std::vector<std::size_t>{128, 13, 13, 13, 13, 13, 13, 13, 13, 12, 12});
  CHECK(make_phase_plan(101, 2, Protocol::lfh, 1).sizes() == std::vector<std::size_t>{51, 25, 25});
  CHECK(make_phase_plan(10, 3, Protocol::lfs, 1).sizes() == std::vector<std::size_t>{4, 3, 3});

  for (std::uint64_t seed : {1, 2, 3}) {
    const auto plan = make_phase_plan(37, 4, Protocol::lfh, seed);
    std::set<int> all;
    std::size_t total = 0;
    for (const auto& phase : plan.classes_per_phase) {
      all.insert(phase.begin(), phase.end());
      total += phase.size();
    }
    CHECK(total == 37);
    CHECK(all.size() == 37);
    CHECK(*all.begin() == 0);
    CHECK(*all.rbegin() == 36);
  }
  CHECK(make_phase_plan(20, 4, Protocol::lfh, 1).classes_per_phase ==
        make_phase_plan(20, 4, Protocol::lfh, 1).classes_per_phase);
  CHECK(make_phase_plan(20, 4, Protocol::lfh, 1).classes_per_phase !=
        make_phase_plan(20, 4, Protocol::lfh, 2).classes_per_phase);

  CHECK_THROWS_AS(make_phase_plan(3, 4, Protocol::lfs, 1), ValidationError);
  CHECK_THROWS_AS(make_phase_plan(4, 0, Protocol::lfs, 1), ValidationError);
  CHECK_THROWS_AS(make_phase_plan(1, 1, Protocol::lfh, 1), ValidationError);
  CHECK_THROWS_AS(make_phase_plan(6, 4, Protocol::lfh, 1), ValidationError);
  CHECK(parse_protocol("LFH") == Protocol::lfh);
  CHECK_THROWS_AS(parse_protocol("lfx"), ValidationError);
}

TEST_CASE("procedural dataset is deterministic and split 80/20") {
  const auto a = procedural_dataset({4, 10, 32, 9});
  const auto b = procedural_dataset({4, 10, 32, 9});
  REQUIRE(a.train.size() == 32);
  REQUIRE(a.test.size() == 8);
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    CHECK(a.train[i].image == b.train[i].image);
    CHECK(a.train[i].source_id == b.train[i].source_id);
  }
  CHECK(a.labels.prompts == b.labels.prompts);
  const auto c = procedural_dataset({4, 10, 32, 10});
  CHECK(a.train[0].image != c.train[0].image);

  std::map<int, int> per_class;
  for (const auto& s : a.test) ++per_class[s.class_id];
  CHECK(per_class == std::map<int, int>{{0, 2}, {1, 2}, {2, 2}, {3, 2}});
  std::set<std::string> ids;
  for (const auto& s : a.train) ids.insert(s.source_id);
  for (const auto& s : a.test) ids.insert(s.source_id);
  CHECK(ids.size() == 40);
  for (std::size_t i = 0; i < a.train.size(); ++i) CHECK(a.train_geometry[i].sides == 3 + a.train[i].class_id % 8);
}

TEST_CASE("extracted edges trace the analytic outline") {
  const auto ds = procedural_dataset({10, 20, 64, 3});
  double worst = 1.0;
  for (std::size_t i = 0; i < ds.train.size(); ++i)
    worst = std::min(worst, outline_recall(imaging::canny_edges(ds.train[i].image), ds.train_geometry[i]));
  for (std::size_t i = 0; i < ds.test.size(); ++i)
    worst = std::min(worst, outline_recall(imaging::canny_edges(ds.test[i].image), ds.test_geometry[i]));
  CHECK(worst >= 0.9);
}

TEST_CASE("dataset is linearly learnable") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto ds = procedural_dataset({10, 60, 64, seed});
    std::vector<std::vector<double>> xtr, xte;
    std::vector<int> ytr, yte;
    for (const auto& s : ds.train) {
      xtr.push_back(featurize(s.image));
      ytr.push_back(s.class_id);
    }
    for (const auto& s : ds.test) {
      xte.push_back(featurize(s.image));
      yte.push_back(s.class_id);
    }
    const auto train = examples_of(xtr, ytr);
    ClassifierState st(kFeatureDim);
    std::vector<int> ids(10);
    std::iota(ids.begin(), ids.end(), 0);
    st.add_classes(ids);
    Rng rng(4);
    train_phase(
        st,
        [&](int) {
          auto e = train;
          rng.shuffle(std::span(e));
          return e;
        },
        {0.05, 60, 32});
    const double acc = evaluate(st, examples_of(xte, yte));
    CAPTURE(seed);
    CHECK(acc >= 0.9);
  }
}

TEST_CASE("featurize") {
  const auto flat = featurize(imaging::RgbImage(20, 30, 77));
  CHECK(flat.size() == static_cast<std::size_t>(kFeatureDim));
  CHECK(std::all_of(flat.begin(), flat.end(), [](double v) { return v == 0.0; }));

  const auto ds = procedural_dataset({10, 20, 64, 1});
  CHECK(featurize(ds.train[0].image) == featurize(ds.train[0].image));
  const auto f = featurize(ds.train[0].image);
  double mean = 0, sq = 0;
  for (std::size_t i = 0; i < f.size(); i += 3) {
    mean += f[i];
    sq += f[i] * f[i];
  }
  CHECK(mean / 256 == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sq / 256 == doctest::Approx(1.0));

  // Bounds measured once over three dataset seeds (max 0.0128 and 0.203).
  Rng rng(1);
  double step = 0, jump = 0;
  for (const auto& s : ds.train) {
    const auto base = featurize(s.image);
    for (int r = 0; r < 5; ++r) {
      const int y = static_cast<int>(rng.below(64)), x = static_cast<int>(rng.below(64)), c = static_cast<int>(rng.below(3));
      const int v = s.image.at(y, x, c);
      auto dist = [&](int to) {
        auto img = s.image;
        img.at(y, x, c) = static_cast<std::uint8_t>(to);
        const auto g = featurize(img);
        double d = 0;
        for (std::size_t j = 0; j < g.size(); ++j) d += (g[j] - base[j]) * (g[j] - base[j]);
        return std::sqrt(d);
      };
      step = std::max(step, dist(v < 255 ? v + 1 : v - 1));
      jump = std::max(jump, dist(v < 128 ? 255 : 0));
    }
  }
  CHECK(step <= 0.014);
  CHECK(jump <= 0.21);
}

TEST_CASE("epoch view with p = 0 keeps real images and one copy per prompt") {
  std::vector<PoolItem> pool;
  for (std::size_t i = 0; i < 6; ++i) pool.push_back({PoolItem::Kind::new_real, 1, i, {100 + i, 200 + i}});
  pool.push_back({PoolItem::Kind::exemplar_real, 0, 6, {106, 206}});
  pool.push_back({PoolItem::Kind::prompt, 0, 0, {300, 301}});
  Rng rng(3);
  const SamplingParams params{0.0, 2, true};
  std::multiset<std::size_t> seen_copies;
  for (int epoch = 0; epoch < 200; ++epoch) {
    const auto view = epoch_view(pool, params, rng);
    REQUIRE(view.size() == pool.size());
    std::multiset<std::size_t> reals;
    for (const auto& e : view) {
      if (pool[e.item].kind == PoolItem::Kind::prompt) {
        seen_copies.insert(e.feature);
      } else {
        CHECK(e.copy == -1);
        reals.insert(e.feature);
      }
    }
    CHECK(reals == std::multiset<std::size_t>{0, 1, 2, 3, 4, 5, 6});
  }
  CHECK(seen_copies.count(300) > 60);
  CHECK(seen_copies.count(301) > 60);

  CHECK_THROWS_AS(validate_pool(pool, {0.2, 0, true}), ValidationError);
  CHECK_THROWS_AS(validate_pool(pool, {0.2, 3, true}), ValidationError);
  CHECK_THROWS_AS(validate_pool(pool, {1.5, 2, true}), ValidationError);
  std::vector<PoolItem> bare{{PoolItem::Kind::prompt, 0, 0, {}}};
  CHECK_THROWS_AS(validate_pool(bare, {0.0, 0, true}), ValidationError);
  CHECK_NOTHROW(validate_pool(pool, params));
}

TEST_CASE("epoch view replacement rate and copy choice") {
  const int n = 10000, k = 5;
  std::vector<PoolItem> pool;
  for (int i = 0; i < n; ++i) {
    PoolItem it{PoolItem::Kind::new_real, 0, static_cast<std::size_t>(i), {}};
    for (int c = 0; c < k; ++c) it.copies.push_back(static_cast<std::size_t>(n + i * k + c));
    pool.push_back(std::move(it));
  }
  Rng rng(11);
  const auto view = epoch_view(pool, {0.3, k, true}, rng);
  const auto replaced = std::count_if(view.begin(), view.end(), [](const EpochEntry& e) { return e.copy >= 0; });
  CHECK(std::abs(replaced / double(n) - 0.3) <= 0.014);

  // 50 000 replacements, 4 degrees of freedom; 18.467 is the 0.999 quantile.
  std::array<double, k> counts{};
  int draws = 0;
  while (draws < 50000) {
    for (const auto& e : epoch_view(pool, {0.3, k, true}, rng)) {
      if (e.copy < 0 || draws == 50000) continue;
      ++counts[static_cast<std::size_t>(e.copy)];
      ++draws;
    }
  }
  double chi2 = 0;
  for (double c : counts) chi2 += (c - draws / double(k)) * (c - draws / double(k)) / (draws / double(k));
  CHECK(chi2 < 18.467);

  // Exemplars are left alone when their augmentation is off.
  for (auto& it : pool) it.kind = PoolItem::Kind::exemplar_real;
  const auto off = epoch_view(pool, {0.3, k, false}, rng);
  CHECK(std::none_of(off.begin(), off.end(), [](const EpochEntry& e) { return e.copy >= 0; }));
  const auto p1 = epoch_view(pool, {1.0, k, true}, rng);
  CHECK(std::all_of(p1.begin(), p1.end(), [](const EpochEntry& e) { return e.copy >= 0; }));
}

TEST_CASE("classifier rows grow with classes") {
  ClassifierState st(4);
  st.add_classes(std::vector<int>{3, 1});
  CHECK(st.rows() == 2);
  CHECK(st.row_of(1) == 1);
  CHECK(st.row_of(7) == -1);
  CHECK(st.weights() == std::vector<double>(8, 0.0));
  st.weights()[0] = 2.0;
  st.add_classes(std::vector<int>{7});
  CHECK(st.weights().size() == 12);
  CHECK(st.weights()[0] == 2.0);
  CHECK(st.bias().size() == 3);
  CHECK_THROWS_AS(st.add_classes(std::vector<int>{1}), ValidationError);
  const std::vector<double> x{1, 0, 0, 0};
  CHECK(st.predict(x) == 3);
}

TEST_CASE("analytic gradient matches finite differences") {
  Rng rng(21);
  for (int inst = 0; inst < 5; ++inst) {
    ClassifierState st(8);
    st.add_classes(std::vector<int>{0, 1, 2});
    for (auto& w : st.weights()) w = rng.normal();
    for (auto& b : st.bias()) b = rng.normal();
    std::vector<std::vector<double>> xs(6, std::vector<double>(8));
    std::vector<int> ys;
    for (auto& x : xs) {
      for (auto& v : x) v = rng.normal();
      ys.push_back(static_cast<int>(rng.below(3)));
    }
    const auto batch = examples_of(xs, ys);
    Gradient g;
    loss_and_gradient(st, batch, g);
    CHECK(max_rel_error(g, oracle::numeric_gradient(st, batch)) < 1e-4);
  }
}

TEST_CASE("training") {
  SUBCASE("separable classes are fit within 50 epochs") {
    Rng rng(5);
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    for (int i = 0; i < 200; ++i) {
      const int y = static_cast<int>(rng.below(2));
      std::vector<double> x(5);
      for (auto& v : x) v = rng.normal();
      x[0] = (y ? 1.0 : -1.0) * rng.uniform(0.2, 2.0);
      xs.push_back(x);
      ys.push_back(y);
    }
    const auto data = examples_of(xs, ys);
    ClassifierState st(5);
    st.add_classes(std::vector<int>{0, 1});
    train_phase(st, [&](int) { return data; }, {0.5, 50, 32});
    CHECK(evaluate(st, data) == 1.0);
  }
  SUBCASE("zero learning rate leaves parameters alone") {
    ClassifierState st(3);
    st.add_classes(std::vector<int>{0, 1});
    st.weights() = {1, 2, 3, 4, 5, 6};
    const auto before = st;
    const std::vector<std::vector<double>> xs{{1, 0, 0}, {0, 1, 0}};
    const auto data = examples_of(xs, {0, 1});
    train_phase(st, [&](int) { return data; }, {0.0, 5, 32});
    CHECK(st == before);
  }
  SUBCASE("divergence raises") {
    ClassifierState st(2);
    st.add_classes(std::vector<int>{0, 1});
    const std::vector<std::vector<double>> xs{{1e200, -1e200}, {-1e200, 1e200}};
    const auto data = examples_of(xs, {0, 1});
    CHECK_THROWS_AS(train_phase(st, [&](int) { return data; }, {1.0, 3, 32}), NumericError);
  }
  SUBCASE("learning rate decays at 60% and 85%") {
    const TrainSchedule s{1.0, 20, 32};
    CHECK(scheduled_rate(s, 0) == 1.0);
    CHECK(scheduled_rate(s, 11) == 1.0);
    CHECK(scheduled_rate(s, 12) == doctest::Approx(0.1));
    CHECK(scheduled_rate(s, 16) == doctest::Approx(0.1));
    CHECK(scheduled_rate(s, 17) == doctest::Approx(0.01));
  }
}

TEST_CASE("evaluate") {
  ClassifierState st(2);
  st.add_classes(std::vector<int>{0, 1, 2, 3});
  st.bias() = {1, 0, 0, 0};
  std::vector<std::vector<double>> xs(8, std::vector<double>{0.5, -0.5});
  const auto balanced = examples_of(xs, {0, 1, 2, 3, 0, 1, 2, 3});
  CHECK(evaluate(st, balanced) == 0.25);

  // Weight rows are the class directions.
  st.weights() = {1, 0, 0, 1, -1, 0, 0, -1};
  st.bias() = {0, 0, 0, 0};
  const std::vector<std::vector<double>> axes{{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  CHECK(evaluate(st, examples_of(axes, {0, 1, 2, 3})) == 1.0);

  CHECK_THROWS_AS(evaluate(st, {}), ValidationError);
  CHECK_THROWS_AS(evaluate(st, examples_of({{1, 0}}, {9})), ValidationError);

  const int c = 7, n = 2000;
  Rng rng(8);
  ClassifierState rnd(6);
  std::vector<int> ids(c);
  std::iota(ids.begin(), ids.end(), 0);
  rnd.add_classes(ids);
  for (auto& w : rnd.weights()) w = rng.normal();
  std::vector<std::vector<double>> px;
  std::vector<int> py;
  for (int i = 0; i < n; ++i) {
    std::vector<double> x(6);
    for (auto& v : x) v = rng.normal();
    px.push_back(x);
    py.push_back(static_cast<int>(rng.below(c)));
  }
  const double p = 1.0 / c;
  CHECK(std::abs(evaluate(rnd, examples_of(px, py)) - p) <= 3 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("config parsing names the offending field") {
  const auto def = parse_config(json::object());
  CHECK(def.phases == 4);
  CHECK(def.classes == 10);
  CHECK(def.train.units_per_class == 4);
  CHECK(parse_config(to_json(def)).train.learning_rate == def.train.learning_rate);
  CHECK(to_json(parse_config(to_json(def))) == to_json(def));

  auto message = [](const json& j) -> std::string {
    try {
      parse_config(j);
    } catch (const ValidationError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message({{"p", 1.5}, {"K", 3}}).find("'p'") != std::string::npos);
  CHECK(message({{"N", "four"}}).find("'N'") != std::string::npos);
  CHECK(message({{"bogus", 1}}).find("'bogus'") != std::string::npos);
  CHECK(message({{"b", -2}}).find("'b'") != std::string::npos);
  CHECK(message({{"p", 0.2}}).find("'K'") != std::string::npos);
  CHECK(message({{"alpha", 0.2}}).find("'K'") != std::string::npos);
  CHECK(message({{"protocol", "lfq"}}).find("'protocol'") != std::string::npos);
  CHECK(message({{"canny", {{"low", 300}, {"high", 200}}}}).find("canny") != std::string::npos);
  CHECK(message({{"p", 0.2}, {"K", 3}, {"alpha", 0.25}}).empty());
}
