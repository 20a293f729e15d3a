#include <doctest.h>

#include <random>
#include <set>

#include "czek/diagram.hpp"
#include "czek/distance.hpp"
#include "czek/experiments.hpp"
#include "czek/random.hpp"
#include "czek/seriation.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace czek;

namespace {

using Row = oracle::Row;

// Random incomplete table where every pair shares coordinate 0.
ResolvedTable random_table(std::mt19937_64& gen, std::size_t n, std::size_t d, double p_missing) {
  std::uniform_real_distribution<double> u(-10, 10);
  std::bernoulli_distribution miss(p_missing);
  std::vector<std::string> labels;
  std::vector<VariableMeta> vars;
  std::vector<std::optional<double>> values;
  for (std::size_t j = 0; j < d; ++j) vars.push_back({"v" + std::to_string(j)});
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("r" + std::to_string(i));
    for (std::size_t j = 0; j < d; ++j)
      values.push_back(j > 0 && miss(gen) ? std::nullopt : std::optional<double>(std::round(u(gen) * 4) / 4));
  }
  Provenance p;
  p.columns.assign(d, ColumnScaling::untouched);
  return ResolvedTable(labels, vars, values, {}, p);
}

Row row_of(const ResolvedTable& t, std::size_t i) {
  const auto r = t.row(i);
  return Row(r.begin(), r.end());
}

DistanceContext refs(const ResolvedTable& t) {
  DistanceContext ctx;
  ctx.reference_a = row_of(t, 0);
  ctx.reference_b = row_of(t, 1);
  return ctx;
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("distance matrices are symmetric, zero-diagonal, nonnegative, finite") {
  std::mt19937_64 gen(1);
  const auto reg = default_registry();
  for (int t = 0; t < 40; ++t) {
    const auto tab = random_table(gen, 3 + static_cast<std::size_t>(t % 8), 6, 0.4);
    const auto ctx = refs(tab);
    for (const auto& name : reg.names()) {
      const auto m = compute_matrix(tab, reg.get(name), ctx);
      for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(m(i, i) == 0.0);
        for (std::size_t j = 0; j < m.size(); ++j) {
          CHECK(m(i, j) == m(j, i));
          CHECK(m(i, j) >= 0.0);
          CHECK(std::isfinite(m(i, j)));
        }
      }
      // f(x, x) = 0 and symmetry straight from eval
      const auto f = reg.get(name);
      const Row x = row_of(tab, 2), y = row_of(tab, 0);
      CHECK(f.eval(y, y, ctx) == 0.0);
      CHECK(f.eval(x, y, ctx) == f.eval(y, x, ctx));
    }
  }
}

TEST_CASE("pairwise-complete rule matches independent per-pair recomputation") {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 40; ++t) {
    const auto tab = random_table(gen, 6, 8, 0.5);
    const auto dd = compute_matrix(tab, dd_function());
    const auto sq = compute_matrix(tab, sq_euclidean_function());
    const auto ctx = refs(tab);
    const auto st = compute_matrix(tab, stolyhwo_function(), ctx);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = i + 1; j < 6; ++j) {
        const Row x = row_of(tab, i), y = row_of(tab, j);
        CHECK(dd(i, j) == doctest::Approx(oracle::dd(x, y)).epsilon(1e-14));
        CHECK(sq(i, j) == doctest::Approx(oracle::sq_euclid(x, y)).epsilon(1e-14));
        CHECK(st(i, j) == doctest::Approx(oracle::stolyhwo(x, y, *ctx.reference_a, *ctx.reference_b, 0.0))
                              .epsilon(1e-14));
      }
  }
}

TEST_CASE("DD and squared Euclidean ignore a common coordinate permutation") {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 30; ++t) {
    const auto tab = random_table(gen, 2, 7, 0.3);
    Row x = row_of(tab, 0), y = row_of(tab, 1);
    const double a = dd_distance(x, y), b = sq_euclidean(x, y);
    std::vector<std::size_t> perm(7);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    Row px, py;
    for (auto k : perm) {
      px.push_back(x[k]);
      py.push_back(y[k]);
    }
    CHECK(dd_distance(px, py) == doctest::Approx(a).epsilon(1e-14));
    CHECK(sq_euclidean(px, py) == doctest::Approx(b).epsilon(1e-14));
  }
}

TEST_CASE("stolyhwo is invariant under per-coordinate positive affine maps") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> scale(0.25, 4.0), shift(-20, 20);
  for (int t = 0; t < 40; ++t) {
    const auto tab = random_table(gen, 4, 6, 0.2);
    const auto ctx = refs(tab);
    const Row x = row_of(tab, 2), y = row_of(tab, 3);
    const double before = stolyhwo_distance(x, y, ctx);
    // Powers of two keep the affine map exact, so ties stay ties.
    std::vector<double> s(6), c(6);
    for (std::size_t k = 0; k < 6; ++k) {
      s[k] = std::ldexp(1.0, static_cast<int>(std::floor(std::log2(scale(gen)))));
      c[k] = std::round(shift(gen));
    }
    auto map = [&](const Row& r) {
      Row out(r.size());
      for (std::size_t k = 0; k < r.size(); ++k)
        if (r[k]) out[k] = s[k] * *r[k] + c[k];
      return out;
    };
    DistanceContext mapped;
    mapped.reference_a = map(*ctx.reference_a);
    mapped.reference_b = map(*ctx.reference_b);
    CHECK(stolyhwo_distance(map(x), map(y), mapped) == before);
  }
}

TEST_CASE("compute_matrix is invariant under row permutation") {
  std::mt19937_64 gen(5);
  const auto tab = random_table(gen, 7, 5, 0.3);
  const auto m = compute_matrix(tab, dd_function());
  std::vector<std::size_t> perm{3, 6, 0, 2, 5, 1, 4};
  std::vector<std::string> labels;
  std::vector<std::optional<double>> values;
  for (auto i : perm) {
    labels.push_back(tab.labels()[i]);
    const auto r = tab.row(i);
    values.insert(values.end(), r.begin(), r.end());
  }
  const ResolvedTable shuffled(labels, tab.variables(), values, {}, tab.provenance());
  CHECK(compute_matrix(shuffled, dd_function()) == m.permuted(perm));
}

TEST_CASE("argmin invariance under scaling and constant shifts, exhaustively for n <= 8") {
  std::mt19937_64 gen(6);
  for (int t = 0; t < 24; ++t) {
    const std::size_t n = 3 + static_cast<std::size_t>(t % 6);
    const auto w = oracle::random_weights(n, gen, true, 20.0);
    const auto base = oracle::brute_force(w, n);
    const auto exact = solve_exact(oracle::matrix(w, n));
    CHECK(exact.objective == base.best);

    auto shifted = w, scaled = w;
    const double c = 7.0, lambda = 3.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) {
          shifted[i * n + j] += c;
          scaled[i * n + j] *= lambda;
        }
    const auto bs = oracle::brute_force(shifted, n);
    const auto bl = oracle::brute_force(scaled, n);
    CHECK(bs.best == base.best + static_cast<double>(n - 1) * c);
    CHECK(bl.best == base.best * lambda);
    CHECK(bs.argmin == base.argmin);
    CHECK(bl.argmin == base.argmin);
    CHECK(solve_exact(oracle::matrix(shifted, n)).permutation == exact.permutation);
    CHECK(solve_exact(oracle::matrix(scaled, n)).permutation == exact.permutation);
    CHECK(solve_exact(oracle::matrix(shifted, n)).objective == bs.best);
  }
}

TEST_CASE("exact never loses to a heuristic; heuristics never lose to their start") {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 15; ++t) {
    const std::size_t n = 6 + static_cast<std::size_t>(t % 6);
    const auto m = oracle::matrix(oracle::random_weights(n, gen, false), n);
    const double exact = solve_exact(m).objective;
    Rng rng(static_cast<std::uint64_t>(t));
    const Permutation start(random_order(n, rng));
    const auto two = solve_two_opt(m, start);
    AnnealSchedule s;
    s.iterations = 3000;
    const auto ann = solve_anneal(m, static_cast<std::uint64_t>(t), s);
    CHECK(two.objective <= path_length(start, m) + 1e-12);
    CHECK(exact <= two.objective + 1e-9);
    CHECK(exact <= ann.objective + 1e-9);
  }
}

TEST_CASE("binning is monotone and affine-covariant") {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 5 + static_cast<std::size_t>(t % 7);
    const auto w = oracle::random_weights(n, gen, false);
    const auto m = oracle::matrix(w, n);
    const auto c = quantile_breaks(m, even_probs(4));
    std::vector<double> vals(w.begin(), w.end());
    std::sort(vals.begin(), vals.end());
    for (std::size_t k = 1; k < vals.size(); ++k) CHECK(c.class_of(vals[k - 1]) <= c.class_of(vals[k]));

    // Exact affine map (power-of-two scale, integer shift of integer data).
    const auto wi = oracle::random_weights(n, gen, true);
    auto wa = wi;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) wa[i * n + j] = 4.0 * wi[i * n + j] + 3.0;
    const auto mi = oracle::matrix(wi, n), ma = oracle::matrix(wa, n);
    const Permutation p = solve_exact(mi).permutation;
    CHECK(classify(mi, p, quantile_breaks(mi, even_probs(4))).classes ==
          classify(ma, p, quantile_breaks(ma, even_probs(4))).classes);
  }
}

TEST_CASE("placement classification is reversal invariant") {
  std::mt19937_64 gen(9);
  const std::vector<std::string> names{"S", "N", "E"};
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(gen() % 10);
    std::vector<std::string> order;
    std::map<std::string, std::string> groups;
    for (std::size_t i = 0; i < n; ++i) {
      order.push_back("o" + std::to_string(i));
      groups[order.back()] = names[gen() % 3];
    }
    const std::string focal = order[gen() % n];
    std::set<std::string> distinct;
    for (const auto& [l, g] : groups) distinct.insert(g);
    if (distinct.size() < 2) continue;
    std::vector<std::string> rev(order.rbegin(), order.rend());
    const auto a = classify_placement(order, groups, focal);
    const auto b = classify_placement(rev, groups, focal);
    CHECK(a.category == b.category);
    CHECK(a.context.own_run_length == b.context.own_run_length);
  }
}

TEST_CASE("renderers are byte-deterministic") {
  std::mt19937_64 gen(10);
  const auto m = oracle::matrix(oracle::random_weights(9, gen, false), 9);
  const auto r = solve_exact(m);
  const auto d1 = classify(m, r.permutation, quantile_breaks(m, even_probs(4)));
  const auto d2 = classify(m, solve_exact(m).permutation, quantile_breaks(m, even_probs(4)));
  CHECK(render_text(d1) == render_text(d2));
  CHECK(render_svg(d1) == render_svg(d2));
}

TEST_CASE("grid reruns with fixed seeds are byte-identical") {
  auto cfg = load_grid_config(fixture::grid_path());
  cfg.pipeline.method = MethodChoice::anneal;  // exercise the seeded path too
  cfg.pipeline.seriate.schedule.iterations = 2000;
  const auto a = run_grid(fixture::skulls(), cfg, default_registry(), std::nullopt, 1);
  const auto b = run_grid(fixture::skulls(), cfg, default_registry(), std::nullopt, 4);
  CHECK(emit_report(a.reports, ReportFormat::json) == emit_report(b.reports, ReportFormat::json));
  CHECK(emit_report(a.reports, ReportFormat::csv) == emit_report(b.reports, ReportFormat::csv));
}

}  // TEST_SUITE
