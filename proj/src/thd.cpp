#include <algorithm>
#include <cmath>
#include <sstream>

#include "mirrorsim/analysis.hpp"
#include "mirrorsim/error.hpp"

namespace mirrorsim::analysis {

double thd_from_magnitudes(double fundamental, std::span<const double> harmonics) {
  if (!(fundamental > 0.0)) throw Error("thd: fundamental magnitude is zero");
  double sum = 0.0;
  for (double h : harmonics) sum += h * h;
  return std::sqrt(sum) / fundamental;
}

namespace {

// Uniform step of the record; Error when the grid is not uniform.
double uniform_step(const Waveform& w) {
  if (w.t.size() < 2 || w.t.size() != w.values.size()) throw Error("thd: waveform has fewer than two samples");
  const double dt = (w.t.back() - w.t.front()) / static_cast<double>(w.t.size() - 1);
  for (std::size_t k = 1; k < w.t.size(); ++k) {
    if (std::abs(w.t[k] - w.t[k - 1] - dt) > 1e-6 * dt) throw Error("thd: waveform is not uniformly sampled");
  }
  return dt;
}

}  // namespace

double default_thd_discard(const Waveform& w, double f0) {
  if (w.t.empty()) return 0.0;
  const double span = w.t.back() - w.t.front();
  return std::max(0.2 * span, 2.0 / f0);
}

ThdResult compute_thd(const Waveform& w, double f0, int n_harmonics, std::optional<double> discard) {
  if (!(f0 > 0.0)) throw Error("thd: fundamental frequency must be positive");
  if (n_harmonics < 1) throw Error("thd: need at least one harmonic");
  const double dt = uniform_step(w);

  const double per_period = 1.0 / (f0 * dt);
  const auto samples_per_period = static_cast<std::size_t>(std::llround(per_period));
  if (std::abs(per_period - static_cast<double>(samples_per_period)) > 1e-6 * per_period) {
    std::ostringstream msg;
    msg << "thd: f0 not resolvable, period is " << per_period << " samples";
    throw Error(msg.str());
  }
  if (samples_per_period < 20) throw Error("thd: f0 not resolvable, fewer than 20 samples per period");
  if (2 * n_harmonics >= static_cast<int>(samples_per_period)) {
    throw Error("thd: highest harmonic lies at or above the Nyquist frequency");
  }

  const double skip = discard.value_or(default_thd_discard(w, f0));
  if (skip < 0.0) throw Error("thd: discard interval must be nonnegative");
  const auto first = static_cast<std::size_t>(std::ceil(skip / dt - 1e-9));
  // Samples first .. last-1 cover whole periods; the final sample closes the window.
  const std::size_t available = first < w.t.size() ? w.t.size() - 1 - first : 0;
  const std::size_t periods = available / samples_per_period;
  if (periods < 2) throw Error("thd: waveform too short, fewer than two periods after the settle interval");
  const std::size_t count = periods * samples_per_period;

  auto magnitude = [&](int k) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      const std::size_t idx = (static_cast<std::size_t>(k) * j) % samples_per_period;
      const double phase = 2.0 * constants::kPi * static_cast<double>(idx) / static_cast<double>(samples_per_period);
      re += w.values[first + j] * std::cos(phase);
      im += w.values[first + j] * std::sin(phase);
    }
    return 2.0 * std::hypot(re, im) / static_cast<double>(count);
  };

  ThdResult r;
  r.fundamental = magnitude(1);
  for (int k = 2; k <= n_harmonics; ++k) r.harmonics.push_back(magnitude(k));
  r.thd = thd_from_magnitudes(r.fundamental, r.harmonics);
  return r;
}

double switching_time(const Waveform& w, double settle_band) {
  if (w.values.empty() || w.t.size() != w.values.size()) throw Error("switching time: empty waveform");
  if (!(settle_band > 0.0)) throw Error("switching time: settle band must be positive");
  const double final = w.values.back();
  const double tol = settle_band * std::abs(final);
  std::size_t k = w.values.size();
  while (k > 0 && std::abs(w.values[k - 1] - final) <= tol) --k;
  const double t_star = w.t[k];
  const double t0 = w.t.front();
  if (t_star - t0 > 0.9 * (w.t.back() - t0)) {
    throw NotSettled("waveform " + w.name + " does not settle within the run");
  }
  return t_star - t0;
}

}  // namespace mirrorsim::analysis
