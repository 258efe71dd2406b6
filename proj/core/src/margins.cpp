#include "boundary/margins.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

namespace boundary {

CampaignResult measure_campaign(const Model& model, const LabeledDataset& samples,
                                const SubspaceSequence& sequence, const AttackConfig& config,
                                int threads) {
  if (sequence.items.empty()) {
    throw std::invalid_argument("measure_campaign: empty subspace sequence");
  }
  if (samples.dim() != model.input_dim() || sequence.ambient_dim() != samples.dim()) {
    throw std::invalid_argument("measure_campaign: dimension mismatch");
  }

  std::vector<int> measured_ids;
  measured_ids.reserve(samples.size());
  for (int i = 0; i < samples.size(); ++i) {
    if (predicted_label(model, samples.features.row(i).transpose()) == samples.labels[i]) {
      measured_ids.push_back(i);
    }
  }

  const int n_sub = sequence.size();
  const int n_meas = static_cast<int>(measured_ids.size());
  std::vector<MarginRecord> records(static_cast<std::size_t>(n_meas) * n_sub);

  auto run_range = [&](int begin, int end) {
    for (int m = begin; m < end; ++m) {
      const int id = measured_ids[m];
      const Vector x = samples.features.row(id).transpose();
      for (int s = 0; s < n_sub; ++s) {
        MarginRecord& rec = records[static_cast<std::size_t>(m) * n_sub + s];
        rec.sample_id = id;
        rec.subspace_label = sequence.items[s].label();
        try {
          const PerturbationResult rep = deepfool(model, x, &sequence.items[s], config);
          rec.margin = rep.margin;
          rec.status = rep.status;
          rec.iterations = rep.iterations;
        } catch (const SubspaceUninformativeError&) {
          // The projected gradient vanished: no reachable boundary in this
          // subspace at x. Counts as censored.
          rec.margin = std::numeric_limits<double>::infinity();
          rec.status = AttackStatus::kCensored;
          rec.iterations = 0;
        }
      }
    }
  };

  const int workers = std::max(1, std::min(threads, n_meas));
  if (workers == 1) {
    run_range(0, n_meas);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n_meas + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(n_meas, begin + chunk);
      if (begin < end) {
        pool.emplace_back(run_range, begin, end);
      }
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  CampaignResult result;
  result.records = std::move(records);
  result.n_measured = n_meas;
  result.n_skipped = samples.size() - n_meas;
  return result;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(values.begin(), values.end());
  const double rank = (p / 100.0) * (static_cast<double>(values.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<MarginSummary> summarize(const std::vector<MarginRecord>& records) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> converged;
  std::map<std::string, int> censored;
  for (const MarginRecord& rec : records) {
    if (converged.find(rec.subspace_label) == converged.end()) {
      order.push_back(rec.subspace_label);
      converged[rec.subspace_label] = {};
      censored[rec.subspace_label] = 0;
    }
    if (rec.status == AttackStatus::kConverged) {
      converged[rec.subspace_label].push_back(rec.margin);
    } else {
      ++censored[rec.subspace_label];
    }
  }

  std::vector<MarginSummary> summaries;
  summaries.reserve(order.size());
  for (const std::string& label : order) {
    MarginSummary s;
    s.subspace_label = label;
    s.n_converged = static_cast<int>(converged[label].size());
    s.n_censored = censored[label];
    if (s.n_converged > 0) {
      s.p05 = percentile(converged[label], 5.0);
      s.median = percentile(converged[label], 50.0);
      s.p95 = percentile(converged[label], 95.0);
    }
    summaries.push_back(std::move(s));
  }
  return summaries;
}

SpectralEnergyResult spectral_energy(const Matrix& perturbations,
                                     const SubspaceSequence& sequence, int epoch) {
  if (sequence.items.empty()) {
    throw std::invalid_argument("spectral_energy: empty subspace sequence");
  }
  if (perturbations.cols() != sequence.ambient_dim()) {
    throw std::invalid_argument("spectral_energy: dimension mismatch");
  }

  SpectralEnergyResult result;
  std::vector<int> live;
  for (int i = 0; i < perturbations.rows(); ++i) {
    if (perturbations.row(i).squaredNorm() > 0.0) {
      live.push_back(i);
    } else {
      ++result.n_skipped;
    }
  }

  for (const Subspace& sub : sequence.items) {
    std::vector<double> fractions;
    fractions.reserve(live.size());
    for (int i : live) {
      const Vector delta = perturbations.row(i).transpose();
      const double projected = (sub.basis().transpose() * delta).squaredNorm();
      fractions.push_back(projected / delta.squaredNorm());
    }
    EnergyProfile profile;
    profile.epoch = epoch;
    profile.subspace_label = sub.label();
    profile.p95_energy_fraction = fractions.empty()
                                      ? std::numeric_limits<double>::quiet_NaN()
                                      : percentile(fractions, 95.0);
    result.profiles.push_back(std::move(profile));
  }
  return result;
}

}  // namespace boundary
