// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <variant>

#include "io/artifacts.hpp"
#include "pipeline/seq2seq.hpp"
#include "pipeline/vae_onestep.hpp"

namespace hbrom::pipeline {

// TrainConfig <-> JSON (keys match the field names; unknown keys rejected).
std::string config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const std::string& text);

// A trained model with everything prediction needs: the network, the
// per-mode normalization, the seed window, timing, and (optionally) the POD
// basis for field reconstruction.
struct TrainedModel {
    TrainConfig cfg;
    std::variant<Seq2SeqModel, VaeOneStepModel> net;
    std::vector<double> mode_scale;
    numkit::DenseMatrix seed_window; // normalized coefficients, seq_in x rank
    double t_start = 0.0;            // time of the first rollout prediction
    double dt = 1.0;
    std::optional<io::PodArtifact> basis;
};

void write_checkpoint(TrainedModel& model, const std::string& path);
TrainedModel read_checkpoint(const std::string& path);

// Rollout in raw (un-normalized) coefficient space.
numkit::DenseMatrix model_rollout(TrainedModel& model, std::size_t horizon);

struct RunnerResult {
    TrainRun run;
    TrainedModel model;
};

// Loads the reduction artifact(s), assembles the task dataset, trains, and
// returns the run plus the checkpoint-ready model. The reduction path is a
// pod artifact for single-trajectory tasks or a pod-ensemble manifest for
// the parameterized Euler task.
RunnerResult run_training(const TrainConfig& cfg, const std::string& reduction_path);

// metrics.csv + checkpoint.json + run.json under out_dir
void write_run_outputs(RunnerResult& result, const std::string& out_dir);

// Euler ensembles: uniform near-square grid of M parameter pairs over
// [2,3] x [3,4].
std::vector<fom::EulerParams> euler_parameter_grid(std::size_t count);

// Aggregates run directories (metrics.csv + run.json) into a comparison
// summary; see the README for the exact keys.
std::string report_runs(const std::vector<std::string>& run_dirs);

// Prediction files: "t,alpha_1..alpha_r" CSV, and optionally the
// reconstructed fields (one row per time, width = basis dof).
void write_prediction_csv(const numkit::DenseMatrix& coeffs, double t_start, double dt,
                          const std::string& path);
void write_field_csv(const numkit::DenseMatrix& fields, const std::string& path);

} // namespace hbrom::pipeline
