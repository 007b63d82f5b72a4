// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero if any line fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ergtower/cli.hpp"

using namespace ergtower;

namespace {

// exact integer identities throughout; only wall-clock limits are tolerances
constexpr double kGsdSeconds = 10.0;
constexpr double kFixedPointSeconds = 60.0;
constexpr double kCoarseSeconds = 30.0;
constexpr int kRandomCases = 10000;

int failures = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void line(const std::string& id, const std::string& what, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = seconds_since(t0);
  if (!o.pass) ++failures;
  std::printf("%s  %-4s %-58s %8.3f s  %s\n", o.pass ? "PASS" : "FAIL", id.c_str(), what.c_str(), s, o.detail.c_str());
  std::fflush(stdout);
}

LatticeSpec torus(std::vector<int> dims) { return LatticeSpec{std::move(dims), Boundary::periodic}; }

std::string dims_text(const std::vector<int>& d) {
  std::string s;
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "x" : "") + std::to_string(d[i]);
  return s;
}

// timed log2 GSD with the per-computation limit enforced
struct Timed {
  long long value;
  double seconds;
};
Timed timed_gsd(const ModelSpec& spec, const std::vector<int>& dims) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto v = log2_gsd(spec, torus(dims));
  return {v, seconds_since(t0)};
}

bool all_commute(const StabilizerModel& m) {
  for (std::size_t i = 0; i < m.generators.size(); ++i) {
    for (std::size_t j = i + 1; j < m.generators.size(); ++j) {
      if (!commutes(m.generators[i].pauli, m.generators[j].pauli)) return false;
    }
  }
  return true;
}

Outcome gsd_constant(const ModelSpec& spec, const std::vector<std::vector<int>>& sizes, long long want) {
  double worst = 0;
  for (const auto& d : sizes) {
    const auto t = timed_gsd(spec, d);
    worst = std::max(worst, t.seconds);
    if (t.value != want) return {false, dims_text(d) + " gave " + std::to_string(t.value)};
    if (t.seconds > kGsdSeconds) return {false, dims_text(d) + " too slow"};
  }
  return {true, std::to_string(sizes.size()) + " sizes, all " + std::to_string(want) + ", slowest " +
                    std::to_string(worst) + " s"};
}

Outcome fit_check(const ModelSpec& spec, long long c2, long long c1) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto fit = gsd_scan_and_fit(spec, size_grid(spec.D, {2, 3}));
  const double per_point = seconds_since(t0) / static_cast<double>(fit.points.size());
  bool ok = fit.exact && fit.symmetric && fit.c2 == c2 && fit.c1 == c1 && per_point < kGsdSeconds;
  for (auto r : fit.residuals) ok = ok && r == 0;
  return {ok, "c2=" + std::to_string(fit.c2) + " c1=" + std::to_string(fit.c1) + " C'=" + std::to_string(fit.c0) +
                  (fit.exact ? " residual 0" : " residual nonzero") + " over " + std::to_string(fit.points.size()) +
                  " sizes"};
}

Outcome fixed_point(const ModelSpec& spec, std::vector<int> dims, CircuitSource src) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = verify_fixed_point(ErgPlan{spec, dims, -1, src});
  const double s = seconds_since(t0);
  return {r.equal && s < kFixedPointSeconds,
          "equal=" + std::string(r.equal ? "true" : "false") + " ranks " + std::to_string(r.h2_rank) + "/" +
              std::to_string(r.h3_rank) + ", " + std::to_string(r.n_gates) + " gates"};
}

Outcome recursion(const ModelSpec& spec, std::vector<int> dims, long long want) {
  const auto r = gsd_recursion_check(spec, dims);
  return {r.ok && r.inserted_gsd == want, dims_text(dims) + ": " + std::to_string(r.gsd_from) + " -> " +
                                              std::to_string(r.gsd_to) + ", increment " +
                                              std::to_string(r.gsd_to - r.gsd_from) + ", want " + std::to_string(want)};
}

PauliString two(const char* s) {
  PauliString p(2);
  for (std::size_t i = 0; i < 2; ++i) {
    if (s[i] == 'X') p.x().set(i);
    if (s[i] == 'Z') p.z().set(i);
  }
  return p;
}

Outcome coarse(int L) {
  const auto t0 = std::chrono::steady_clock::now();
  const bool inv = us_is_involution(UsTable::standard());
  const auto r = run_coarse_graining(L);
  const double s = seconds_since(t0);
  return {inv && r.ok() && s < kCoarseSeconds,
          "involution=" + std::string(inv ? "true" : "false") + " configs=" + std::to_string(r.n_configs) +
              " ghz_failures=" + std::to_string(r.ghz_failures) + " coarse " + std::to_string(r.coarse_size) + "/" +
              std::to_string(r.expected_size)};
}

}  // namespace

int main() {
  // 1. ground-state degeneracy formulas
  line("1a", "[0,1,2,2] LxL, L=2..5: log2 GSD = 2", [] {
    return gsd_constant({0, 1, 2, 2}, {{2, 2}, {3, 3}, {4, 4}, {5, 5}}, 2);
  });
  line("1b", "[1,2,3,3] L^3, L=2,3: log2 GSD = 3", [] {
    return gsd_constant({1, 2, 3, 3}, {{2, 2, 2}, {3, 3, 3}}, 3);
  });
  line("1c", "[0,1,2,3] dims in {2,3,4}^3: 2(L1+L2+L3)-3", [] {
    double worst = 0;
    const auto sizes = size_grid(3, {2, 3, 4});
    for (const auto& d : sizes) {
      const auto t = timed_gsd({0, 1, 2, 3}, d);
      worst = std::max(worst, t.seconds);
      const long long want = 2LL * (d[0] + d[1] + d[2]) - 3;
      if (t.value != want || t.seconds > kGsdSeconds) return Outcome{false, dims_text(d) + " gave " + std::to_string(t.value)};
    }
    return Outcome{true, std::to_string(sizes.size()) + " sizes exact, slowest " + std::to_string(worst) + " s"};
  });
  line("1d", "[1,2,3,4] dims in {2,3}^4: 3 per L_i, residual 0", [] { return fit_check({1, 2, 3, 4}, 0, 3); });
  line("1e", "[0,1,2,4] dims in {2,3}^4: 2 per L_iL_j, -3 per L_i", [] { return fit_check({0, 1, 2, 4}, 2, -3); });

  // 2. fixed point
  line("2a", "[0,1,2,2] 3x3 -> 3x4, product insertion", [] {
    return fixed_point({0, 1, 2, 2}, {3, 3}, CircuitSource::paper);
  });
  line("2b", "[0,1,2,3] 2x2x2 -> 2x2x3, paper circuit", [] {
    return fixed_point({0, 1, 2, 3}, {2, 2, 2}, CircuitSource::paper);
  });
  line("2c", "[0,1,2,3] 2x2x2 -> 2x2x3, general circuit", [] {
    return fixed_point({0, 1, 2, 3}, {2, 2, 2}, CircuitSource::general);
  });
  line("2d", "[0,1,2,3] 3x3x2 -> 3x3x3, paper circuit", [] {
    return fixed_point({0, 1, 2, 3}, {3, 3, 2}, CircuitSource::paper);
  });
  line("2e", "[0,1,2,3] 3x3x2 -> 3x3x3, general circuit", [] {
    return fixed_point({0, 1, 2, 3}, {3, 3, 2}, CircuitSource::general);
  });
  line("2f", "[0,1,2,4] 2^4 -> 2x2x2x3, paper circuit", [] {
    return fixed_point({0, 1, 2, 4}, {2, 2, 2, 2}, CircuitSource::paper);
  });
  line("2g", "[0,1,2,4] 2^4 -> 2x2x2x3, general circuit", [] {
    return fixed_point({0, 1, 2, 4}, {2, 2, 2, 2}, CircuitSource::general);
  });
  line("2h", "[1,2,3,4] 2^4 -> 2x2x2x3, paper circuit", [] {
    return fixed_point({1, 2, 3, 4}, {2, 2, 2, 2}, CircuitSource::paper);
  });

  // 3. recursion of the degeneracy
  line("3a", "[0,1,2,2] growth adds the product layer: increment 0", [] { return recursion({0, 1, 2, 2}, {3, 3}, 0); });
  line("3b", "[0,1,2,3] increment 2", [] {
    auto a = recursion({0, 1, 2, 3}, {2, 2, 2}, 2);
    auto b = recursion({0, 1, 2, 3}, {3, 3, 2}, 2);
    return Outcome{a.pass && b.pass, a.detail + "; " + b.detail};
  });
  line("3c", "[1,2,3,4] increment 3", [] { return recursion({1, 2, 3, 4}, {2, 2, 2, 2}, 3); });
  line("3d", "[0,1,2,4] increment 2L1+2L2+2L3-3", [] {
    auto a = recursion({0, 1, 2, 4}, {2, 2, 2, 2}, 9);
    auto b = recursion({0, 1, 2, 4}, {2, 3, 2, 2}, 11);
    return Outcome{a.pass && b.pass, a.detail + "; " + b.detail};
  });

  // 4. conjugation table
  line("4a", "CNOT: XI<->XX, IX<->IX, ZI<->ZI, IZ<->ZZ", [] {
    const bool ok = cnot_conjugate(two("XI"), 0, 1) == two("XX") && cnot_conjugate(two("XX"), 0, 1) == two("XI") &&
                    cnot_conjugate(two("IX"), 0, 1) == two("IX") && cnot_conjugate(two("ZI"), 0, 1) == two("ZI") &&
                    cnot_conjugate(two("IZ"), 0, 1) == two("ZZ") && cnot_conjugate(two("ZZ"), 0, 1) == two("IZ");
    return Outcome{ok, "both directions"};
  });
  line("4b", "random involution and symplectic form, 10^4 cases", [] {
    std::mt19937 rng(20240611);
    int bad = 0;
    for (int it = 0; it < kRandomCases; ++it) {
      const std::size_t n = 2 + rng() % 5;
      const std::size_t c = rng() % n;
      const std::size_t t = (c + 1 + rng() % (n - 1)) % n;
      PauliString p(n), q(n);
      for (std::size_t i = 0; i < n; ++i) {
        p.x().set(i, rng() & 1u);
        p.z().set(i, rng() & 1u);
        q.x().set(i, rng() & 1u);
        q.z().set(i, rng() & 1u);
      }
      const auto p2 = cnot_conjugate(p, c, t);
      const auto q2 = cnot_conjugate(q, c, t);
      if (cnot_conjugate(p2, c, t) != p || commutes(p, q) != commutes(p2, q2) || p2.sign() != 1) ++bad;
    }
    return Outcome{bad == 0, std::to_string(bad) + " violations"};
  });

  // 5. term-by-term mapping audit
  for (const auto& [id, spec, dims] : std::vector<std::tuple<std::string, ModelSpec, std::vector<int>>>{
           {"5a", {0, 1, 2, 3}, {2, 2, 2}}, {"5b", {1, 2, 3, 4}, {2, 2, 2, 2}}}) {
    line(id, "mapping audit " + spec.to_string() + " " + dims_text(dims), [spec = spec, dims = dims] {
      const auto r = check_mapping_claims(ErgPlan{spec, dims, -1, CircuitSource::paper});
      std::string counts;
      for (const auto& [k, v] : r.class_counts) counts += " " + k + "=" + std::to_string(v);
      return Outcome{r.ok(), std::to_string(r.violations.size()) + " violations;" + counts};
    });
  }

  // 6. coarse graining
  line("6a", "coarse graining L=3 (involution, GHZ, coarse support)", [] { return coarse(3); });
  line("6b", "coarse graining L=4 (involution, GHZ, coarse support)", [] { return coarse(4); });

  // 7. property suites
  line("7a", "generator commutation for every built model", [] {
    int models = 0;
    for (const auto& [spec, dims] : std::vector<std::pair<ModelSpec, std::vector<int>>>{
             {{0, 1, 2, 2}, {3, 3}}, {{1, 2, 3, 3}, {2, 2, 2}}, {{0, 1, 2, 3}, {2, 3, 4}},
             {{0, 1, 2, 4}, {2, 2, 2, 3}}, {{1, 2, 3, 4}, {2, 2, 3, 2}}}) {
      if (!all_commute(build_model(spec, torus(dims)))) return Outcome{false, spec.to_string()};
      if (!all_commute(build_h1(ErgPlan{spec, dims, -1, CircuitSource::paper}))) return Outcome{false, "H1 " + spec.to_string()};
      models += 2;
    }
    return Outcome{true, std::to_string(models) + " models incl. H1"};
  });
  line("7b", "B-constraint closure of configuration groups", [] {
    for (const auto& [spec, dims] : std::vector<std::pair<ModelSpec, std::vector<int>>>{
             {{0, 1, 2, 2}, {3, 3}}, {{0, 1, 2, 3}, {2, 2, 2}}, {{1, 2, 3, 3}, {2, 2, 2}}}) {
      const auto m = build_model(spec, torus(dims));
      const auto g = config_group(m);
      for (const auto& c : enumerate_configs(g, 1u << 20)) {
        if (!check_b_constraints(c, m)) return Outcome{false, spec.to_string()};
      }
    }
    return Outcome{true, "every enumerated configuration"};
  });
  line("7c", "circuit conditions on every emitted circuit", [] {
    int n = 0;
    for (const auto& plan : std::vector<ErgPlan>{{{0, 1, 2, 2}, {3, 3}, -1, CircuitSource::paper},
                                                 {{0, 1, 2, 3}, {2, 2, 2}, -1, CircuitSource::paper},
                                                 {{0, 1, 2, 3}, {3, 3, 2}, -1, CircuitSource::general},
                                                 {{0, 1, 2, 4}, {2, 2, 2, 2}, -1, CircuitSource::paper},
                                                 {{0, 1, 2, 4}, {2, 2, 2, 2}, -1, CircuitSource::general},
                                                 {{1, 2, 3, 4}, {2, 2, 2, 2}, -1, CircuitSource::paper},
                                                 {{1, 2, 3, 4}, {2, 2, 2, 2}, -1, CircuitSource::general}}) {
      const auto r = validate_circuit_conditions(build_circuit(plan), plan);
      if (!r.ok()) return Outcome{false, plan.spec.to_string() + ": " + r.violations.front()};
      ++n;
    }
    return Outcome{true, std::to_string(n) + " circuits"};
  });
  line("7d", "byte-identical reports across repeated runs", [] {
    cli::RunConfig cfg;
    cfg.circuit = "general";
    for (int rep = 0; rep < 2; ++rep) {
      const auto a = cli::render(cli::cmd_erg_verify("[0,1,2,3]@2x2x2:pbc", cfg), "json");
      const auto b = cli::render(cli::cmd_erg_verify("[0,1,2,3]@2x2x2:pbc", cfg), "json");
      const auto c = cli::render(cli::cmd_erg_circuit("[1,2,3,4]@2x2x2x2:pbc", cfg), "csv");
      const auto d = cli::render(cli::cmd_erg_circuit("[1,2,3,4]@2x2x2x2:pbc", cfg), "csv");
      if (a != b || c != d) return Outcome{false, "reports differ"};
    }
    return Outcome{true, "json and csv"};
  });

  std::printf("%s: %d failing line(s)\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
