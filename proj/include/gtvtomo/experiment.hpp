#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gtvtomo/gtv_denoise.hpp"
#include "gtvtomo/metrics.hpp"
#include "gtvtomo/noise.hpp"
#include "gtvtomo/patch_graph.hpp"
#include "gtvtomo/phantoms.hpp"
#include "gtvtomo/recon.hpp"

namespace gtvtomo {

enum class Method { FBP, ART, SIRT };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// Everything needed to run the denoise-then-reconstruct pipeline once.
struct ExperimentSpec {
    PhantomKind phantom = PhantomKind::SheppLogan;
    int n = 64;
    int p = 95;
    int q = 36;
    double noise_level = 0.08;
    std::uint64_t seed = 1; ///< drives the random phantoms and the noise
    PatchConfig patch{};
    /// One value = fixed gamma; several = oracle sweep per method.
    std::vector<double> gammas = default_gamma_grid();
    std::vector<Method> methods{Method::FBP, Method::ART};
    FbpConfig fbp{};
    ArtConfig art{0.25, 100};
    SirtConfig sirt{20.0, 200};
    DenoiseConfig denoise{0.0, 1e-6, 500};
    int profile_row = -1; ///< -1 selects the centre row n/2
    std::filesystem::path output_dir;
    bool write_artifacts = true;

    void validate() const;
    /// Apply one `key = value` setting. Throws std::invalid_argument for an
    /// unknown key or a malformed value.
    void set(std::string_view key, std::string_view value);
};

/// Parse a flat `key = value` file; blank lines and `#` comments are ignored.
ExperimentSpec load_spec(const std::filesystem::path& path, ExperimentSpec base = {});

struct MethodOutcome {
    Method method;
    bool denoised;
    double gamma;
    double final_error;
    double min_error;
    int argmin_iteration; ///< 1-based; always 1 for FBP
    double sinogram_rel_error; ///< input sinogram vs clean sinogram
    ErrorCurve curve;
    Image image;
};

struct ExperimentSummary {
    std::vector<MethodOutcome> outcomes; ///< per method: raw then graph-denoised
    double noisy_rel_error = 0.0;
    std::vector<std::filesystem::path> artifacts;

    const MethodOutcome& find(Method m, bool denoised) const;
};

/// phantom -> project -> noise -> patch graph -> denoise -> reconstruct both
/// the raw and denoised sinograms with every requested method. Writes all
/// artifacts to spec.output_dir when spec.write_artifacts is set.
ExperimentSummary run_experiment(const ExperimentSpec& spec);

/// method,variant,gamma,final_error,min_error,argmin_iteration,sinogram_rel_error
void write_summary_csv(const std::filesystem::path& path, const ExperimentSummary& summary);

struct Table1Options {
    std::vector<std::uint64_t> seeds{1};
    std::vector<double> noise_levels{0.05, 0.08};
    std::vector<double> gammas = default_gamma_grid();
    ArtConfig art{0.25, 100};
    SirtConfig sirt{20.0, 200};
    DenoiseConfig denoise{0.0, 1e-6, 500};
    int n = 64;
    int p = 95;
    int q = 36;
    bool write_run_artifacts = false;
};

struct Table1Cell {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> samples;
};

struct Table1Row {
    PhantomKind phantom;
    double noise_level;
    Method iterative; ///< ART for Shepp-Logan rows, SIRT for Smooth rows
    Table1Cell fbp, fbp_gd, iter, iter_gd; ///< minimum l2 errors
};

struct Table1 {
    std::vector<Table1Row> rows;
};

/// Run the four comparison rows averaged over `seeds`; writes table1.txt and
/// table1.csv into output_dir (and per-run subdirectories on request).
Table1 run_table1(const std::filesystem::path& output_dir, const Table1Options& options);

} // namespace gtvtomo
