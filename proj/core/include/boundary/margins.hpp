#pragma once

#include <string>
#include <vector>

#include "boundary/attacks.hpp"
#include "boundary/dataset.hpp"
#include "boundary/model.hpp"
#include "boundary/subspace.hpp"

namespace boundary {

struct MarginRecord {
  int sample_id = 0;
  std::string subspace_label;
  double margin = 0.0;
  AttackStatus status = AttackStatus::kCensored;
  int iterations = 0;
};

struct MarginSummary {
  std::string subspace_label;
  // NaN when no record converged.
  double p05 = std::numeric_limits<double>::quiet_NaN();
  double median = std::numeric_limits<double>::quiet_NaN();
  double p95 = std::numeric_limits<double>::quiet_NaN();
  int n_converged = 0;
  int n_censored = 0;
};

struct CampaignResult {
  std::vector<MarginRecord> records;  // ordered by (sample_id, subspace index)
  int n_measured = 0;
  int n_skipped = 0;  // samples the model misclassifies
};

// Runs subspace-constrained DeepFool for every (correctly classified
// sample, subspace) pair. Work may be spread over threads; the record
// order is fixed regardless.
CampaignResult measure_campaign(const Model& model, const LabeledDataset& samples,
                                const SubspaceSequence& sequence, const AttackConfig& config,
                                int threads = 1);

// Linear-interpolation percentile over the sorted values; p in [0, 100].
double percentile(std::vector<double> values, double p);

// Per-subspace 5th/50th/95th percentiles over converged records, in order
// of first appearance.
std::vector<MarginSummary> summarize(const std::vector<MarginRecord>& records);

struct EnergyProfile {
  int epoch = 0;
  std::string subspace_label;
  double p95_energy_fraction = 0.0;
};

struct SpectralEnergyResult {
  std::vector<EnergyProfile> profiles;
  int n_skipped = 0;  // zero-norm perturbations
};

// Fraction ||P_S delta||^2 / ||delta||^2 per perturbation (rows) and
// subspace; reports the 95th percentile across the batch.
SpectralEnergyResult spectral_energy(const Matrix& perturbations,
                                     const SubspaceSequence& sequence, int epoch);

}  // namespace boundary
