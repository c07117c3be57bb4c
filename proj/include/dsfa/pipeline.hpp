#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dsfa/dsfa_net.hpp"
#include "dsfa/eval.hpp"
#include "dsfa/predetect.hpp"
#include "dsfa/raster.hpp"
#include "dsfa/segment.hpp"
#include "dsfa/types.hpp"

namespace dsfa {

enum class Method { Cva, Pca, Usfa, Isfa, Dsfa };
enum class ThresholdAlgo { Otsu, Kmeans, Best };

struct PipelineConfig {
  Method method = Method::Dsfa;
  std::filesystem::path t1;
  std::filesystem::path t2;
  std::filesystem::path gt;  // optional; empty = no ground truth
  std::filesystem::path out_dir;
  TrainConfig train;
  int sample_count = 0;  // 0 = min(4000, 25% of pixels), clamped to the pool
  ThresholdAlgo threshold = ThresholdAlgo::Otsu;
  SampleStrategy strategy = SampleStrategy::Cva;
  int runs = 10;  // independent trainings whose intensities are summed (dsfa)
  std::uint64_t seed = 0;
  bool save_params = false;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunReport {
  Method method = Method::Dsfa;
  int runs = 1;
  Vector intensity;  // summed over runs for dsfa
  BinaryMask mask;
  double threshold_value = 0.0;
  int dof = 0;
  int isfa_iterations = 0;
  int sample_count = 0;
  std::vector<std::vector<double>> loss_histories;
  std::vector<StageTiming> timings;
  std::optional<MetricBundle> metric_bundle;
  ConfusionCounts counts;
  std::vector<std::filesystem::path> manifest;
};

struct SynthScene {
  MultibandImage img1;
  MultibandImage img2;
  GroundTruth gt;  // fully sampled
};

// Smooth multiband field with widely different per-band amplitudes; the
// second date adds i.i.d. noise everywhere plus a per-blob spectral shift
// (random direction and magnitude) on rectangles covering roughly
// change_fraction of the scene. Deterministic per seed.
SynthScene synth_generate(int rows, int cols, int bands, double change_fraction,
                          double noise_std, std::uint64_t seed);

// One end-to-end execution: load, z-score, pre-detect and sample (dsfa),
// train, project, chi-square intensity, threshold, metrics when ground truth
// is available, and file outputs (intensity.pgm, mask.pgm, metrics.json,
// report.json, loss_history.csv for dsfa).
RunReport run_pipeline(const PipelineConfig& config);

// config.runs independent trainings seeded seed+0..runs-1; intensities are
// summed elementwise before thresholding. Requires method = dsfa.
RunReport multi_run(const PipelineConfig& config);

struct SweepRow {
  std::string key;
  MetricBundle metric_bundle;
};

// Runs the pipeline once per regularization value with everything else
// fixed; writes sweep_r.csv (header "r,oa") under config.out_dir.
std::vector<SweepRow> sweep_r(const PipelineConfig& config, const std::vector<double>& r_values);

// Runs the pipeline once per sampling strategy; writes sweep_strategy.csv
// (header "strategy,oa_chg,oa_un,oa,kappa,f1") under config.out_dir.
std::vector<SweepRow> sweep_strategy(const PipelineConfig& config,
                                     const std::vector<SampleStrategy>& strategies);

GroundTruth load_ground_truth(const std::filesystem::path& path, int rows, int cols);
MultibandImage ground_truth_to_image(const GroundTruth& gt, int rows, int cols);

std::string to_string(Method m);
std::string to_string(SampleStrategy s);

}  // namespace dsfa
