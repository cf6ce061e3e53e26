#include "digeco/stability.hpp"

#include <cmath>
#include <sstream>

#include "digeco/parallel.hpp"

namespace digeco {

MacroFlags classify_generation(std::span<const double> fitness, double global_max, double tol) {
  MacroFlags f;
  const double half = 0.5 * global_max;
  for (double v : fitness) {
    if (std::abs(v - global_max) <= tol) f.max = true;
    if (std::abs(v - half) <= tol) f.half = true;
  }
  return f;
}

OccupationProbabilities occupation_probabilities(std::span<const OccupationTrace> runs) {
  if (runs.empty()) throw Error(Errc::InvalidArgument, "no runs");
  const std::size_t horizon = runs.front().size();
  for (const auto& r : runs)
    if (r.size() != horizon) throw Error(Errc::InvalidArgument, "runs have unequal horizons");
  OccupationProbabilities out;
  out.p_max.assign(horizon, 0.0);
  out.p_half.assign(horizon, 0.0);
  out.p_other.assign(horizon, 0.0);
  const double n = static_cast<double>(runs.size());
  for (std::size_t t = 0; t < horizon; ++t) {
    std::size_t c[3] = {0, 0, 0};
    for (const auto& r : runs) ++c[r[t].cell()];
    out.p_max[t] = static_cast<double>(c[0]) / n;
    out.p_half[t] = static_cast<double>(c[1]) / n;
    out.p_other[t] = static_cast<double>(c[2]) / n;
  }
  return out;
}

double degree_of_instability(std::span<const double> p, std::size_t n_states) {
  if (n_states < 2) throw Error(Errc::InvalidArgument, "need at least two states");
  if (p.size() > n_states) throw Error(Errc::NotADistribution, "more probabilities than states");
  double sum = 0.0;
  for (double v : p) {
    if (v < 0.0 || !std::isfinite(v)) throw Error(Errc::NotADistribution, "negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(Errc::NotADistribution, "probabilities do not sum to 1");
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h / std::log(static_cast<double>(n_states));
}

StabilityReport stability_at(const OccupationProbabilities& occ, std::size_t generation) {
  StabilityReport r;
  r.p_hat = {occ.p_max.at(generation), occ.p_half.at(generation), occ.p_other.at(generation)};
  r.d_ins = degree_of_instability(r.p_hat, 3);
  return r;
}

StabilitySetup default_stability_setup() {
  StabilitySetup s;
  std::vector<AttributeTuple> part;
  for (int id = 1; id <= 8; ++id) part.push_back({id, 50});
  s.request.parts.push_back(part);
  // Four key agents, each exact on one pair of required ids.
  for (int j = 0; j < 4; ++j)
    s.alphabet.push_back(SemanticDescription::canonicalize(
        {{2 * j + 1, 50}, {2 * j + 2, 50}, {60 + j, 10}}, LengthCheck::Agent));
  // One near miss standing in for the first key.
  s.alphabet.push_back(
      SemanticDescription::canonicalize({{1, 50}, {2, 51}, {70, 10}}, LengthCheck::Agent));
  // Fillers off by 4 on both ids of a pair.
  for (int k = 0; k < 15; ++k) {
    const int j = k % 4;
    s.alphabet.push_back(SemanticDescription::canonicalize(
        {{2 * j + 1, 54}, {2 * j + 2, 46}, {80 + k, 10}}, LengthCheck::Agent));
  }
  return s;
}

std::vector<OccupationTrace> stability_runs(const StabilitySetup& setup, EvolutionParams params,
                                            int horizon, std::size_t runs, std::uint64_t seed) {
  params.max_generations = horizon;
  params.stall_generations = 0;
  params.stop_at_optimum = false;
  params.initial_max_length = 1;
  std::vector<OccupationTrace> out(runs);
  const Rng master(seed);
  parallel_for_runs(runs, [&](std::size_t r) {
    Population pop(setup.alphabet, {setup.request}, params, master.derive({r}));
    OccupationTrace trace;
    trace.reserve(static_cast<std::size_t>(horizon) + 1);
    pop.run(nullptr, [&](const Population& p) { trace.push_back(classify_generation(p.fitness())); });
    out[r] = std::move(trace);
  });
  return out;
}

std::vector<GridCell> stability_grid(const StabilitySetup& setup, EvolutionParams base,
                                     std::span<const double> mutations,
                                     std::span<const double> crossovers, std::size_t runs_per_cell,
                                     int horizon, std::uint64_t seed) {
  std::vector<GridCell> out;
  std::uint64_t cell = 0;
  for (double m : mutations) {
    for (double c : crossovers) {
      EvolutionParams p = base;
      p.mutation_rate = m;
      p.crossover_rate = c;
      auto traces = stability_runs(setup, p, horizon, runs_per_cell, mix64(seed + cell++));
      auto occ = occupation_probabilities(traces);
      auto rep = stability_at(occ, static_cast<std::size_t>(horizon));
      out.push_back({m, c, rep.d_ins, rep.p_hat});
    }
  }
  return out;
}

std::string occupation_csv(const OccupationProbabilities& occ) {
  std::ostringstream os;
  os << "generation,p_max,p_half\n";
  for (std::size_t t = 0; t < occ.p_max.size(); ++t) os << t << ',' << occ.p_max[t] << ',' << occ.p_half[t] << '\n';
  return os.str();
}

}  // namespace digeco
