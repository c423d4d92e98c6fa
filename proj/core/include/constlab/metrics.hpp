// Copyright 2026 The constlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Confusion matrices, Cohen's kappa and the 1 - kappa competition loss.
// Rows are true classes, columns are predicted classes.

#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace constlab {

class MetricsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfusionMatrix {
public:
    /// K x K zero matrix with the given labels (K >= 2).
    explicit ConfusionMatrix(std::vector<std::string> labels);
    /// Takes row-major counts; throws MetricsError unless counts is K x K.
    ConfusionMatrix(std::vector<std::string> labels, std::vector<std::vector<std::uint64_t>> counts);
    /// Unlabelled K x K matrix; labels default to "0".."K-1".
    static ConfusionMatrix from_counts(std::vector<std::vector<std::uint64_t>> counts);

    std::size_t classes() const noexcept { return labels_.size(); }
    const std::vector<std::string> &labels() const noexcept { return labels_; }

    std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts_.at(truth * classes() + predicted); }
    std::uint64_t &at(std::size_t truth, std::size_t predicted) { return counts_.at(truth * classes() + predicted); }
    void add(std::size_t truth, std::size_t predicted, std::uint64_t n = 1) { at(truth, predicted) += n; }

    std::uint64_t total() const noexcept;
    std::uint64_t row_sum(std::size_t k) const;
    std::uint64_t col_sum(std::size_t k) const;
    std::uint64_t trace() const;

private:
    std::vector<std::string> labels_;
    std::vector<std::uint64_t> counts_;
};

/// kappa = (p_o - p_e) / (1 - p_e) with p_o = trace / N and
/// p_e = sum_k row_k col_k / N^2. Throws MetricsError when N = 0 or p_e = 1.
double cohens_kappa(const ConfusionMatrix &m);

/// L = 1 - kappa.
double competition_loss(const ConfusionMatrix &m);

struct ClassDistribution {
    std::vector<std::string> labels;
    std::vector<std::uint64_t> counts;

    std::uint64_t total() const noexcept;
};

/// Evaluation-set class counts of the onboard scene-classification
/// challenge, 588 patches over 8 classes.
ClassDistribution opssat_eval_distribution();

/// Training preset of the same challenge: 10 labelled patches per class.
ClassDistribution opssat_train_distribution();

/// Reference leaderboard scores (1 - kappa); documentation constants only.
namespace reference {
inline constexpr double kWinningLoss = 0.367140;
inline constexpr double kBaselineLoss = 0.539694;
} // namespace reference

/// Parses a confusion matrix from CSV: header row holds the predicted
/// labels (its first cell is ignored), each following row is a true label
/// followed by K non-negative integer counts. Throws MetricsError with the
/// offending line number on malformed input.
ConfusionMatrix read_confusion_csv(std::istream &in);

} // namespace constlab
