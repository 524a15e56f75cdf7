#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lipvessel/dataset.hpp"
#include "lipvessel/errors.hpp"
#include "lipvessel/evaluation.hpp"
#include "lipvessel/image_io.hpp"
#include "lipvessel/segmentation.hpp"

namespace fs = std::filesystem;
using namespace lipvessel;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitPipeline = 3;

struct CommonFlags {
    double fov_angle = 0.0;
    double fov_threshold = 0.0;
    int orientation_count = 0;
    double area_fraction = 0.0;
    double change_limit = 0.0;
    int max_probes = 0;
    double discard_fraction = 0.0;
    bool adapt = true;
    std::string out_dir;
    bool save_maps = false;
    bool full_frame_eval = false;
    int threads = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--fov-angle", fov_angle, "camera field-of-view angle, degrees");
        cmd->add_option("--fov-threshold", fov_threshold,
                        "luminance threshold for mask extraction (0-255)");
        cmd->add_option("--orientations", orientation_count, "number of probe orientations");
        cmd->add_option("--area-fraction", area_fraction,
                        "fraction of the field of view segmented as vessels");
        cmd->add_option("--change-limit", change_limit,
                        "maximum accepted segmentation change when adding a probe");
        cmd->add_option("--max-probes", max_probes, "largest probe count considered (1-3)");
        cmd->add_option("--discard-fraction", discard_fraction,
                        "fraction of minimal points dropped by the robust minimum");
        cmd->add_flag("--adapt-intensities,!--no-adapt-intensities", adapt,
                      "adapt probe intensities to the image mean (default: on)");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_flag("--save-maps", save_maps, "also write vesselness and score rasters");
        cmd->add_flag("--full-frame-eval", full_frame_eval,
                      "evaluate over the whole frame instead of the field of view");
        cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
    }

    void apply(const CLI::App* cmd, RunConfig& cfg) const {
        if (cmd->count("--fov-angle")) cfg.params.fov_angle_deg = fov_angle;
        if (cmd->count("--fov-threshold")) cfg.params.fov_threshold = fov_threshold;
        if (cmd->count("--orientations")) cfg.params.orientation_count = orientation_count;
        if (cmd->count("--area-fraction")) cfg.params.area_fraction = area_fraction;
        if (cmd->count("--change-limit")) cfg.params.change_limit = change_limit;
        if (cmd->count("--max-probes")) cfg.params.max_probes = max_probes;
        if (cmd->count("--discard-fraction")) cfg.params.discard_fraction = discard_fraction;
        if (cmd->count("--adapt-intensities") || cmd->count("--no-adapt-intensities"))
            cfg.params.adapt_intensities = adapt;
        if (cmd->count("--out")) cfg.out_dir = out_dir;
        if (cmd->count("--save-maps")) cfg.save_maps = true;
        if (cmd->count("--full-frame-eval")) cfg.full_frame_eval = true;
        if (cmd->count("--threads")) cfg.threads = threads;
    }
};

RunConfig make_config(const std::string& config_path, const CLI::App* cmd,
                      const CommonFlags& flags) {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_run_config(config_path);
    flags.apply(cmd, cfg);
    return cfg;
}

void ensure_out_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
}

std::string ratio4(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return buf;
}

// Writes <stem>_vessels.png and, when asked, the float rasters in both
// exported forms (PFM and 16-bit PNG with a min/max sidecar).
void write_outputs(const RunConfig& cfg, const std::string& stem,
                   const SegmentationResult& result) {
    const fs::path out(cfg.out_dir);
    save_mask_png(out / (stem + "_vessels.png"), result.mask);
    if (!cfg.save_maps) return;
    save_pfm(out / (stem + "_vesselness.pfm"), result.vesselness.values);
    save_png16_with_sidecar(out / (stem + "_vesselness.png"), result.vesselness.values);
    save_pfm(out / (stem + "_phi.pfm"), result.normalized.values);
    save_png16_with_sidecar(out / (stem + "_phi.png"), result.normalized.values);
}

SegmentationResult segment_file(const RunConfig& cfg, const fs::path& image_path,
                                const fs::path& fov_path) {
    const ColorImage img = load_color(image_path);
    std::optional<BinaryMask> fov;
    if (!fov_path.empty()) fov = load_mask(fov_path);
    return segment_vessels(img, fov, cfg.params);
}

int cmd_segment(const RunConfig& cfg, const std::string& image_path,
                const std::string& fov_path) {
    const auto t0 = std::chrono::steady_clock::now();
    const SegmentationResult result = segment_file(cfg, image_path, fov_path);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();

    ensure_out_dir(cfg.out_dir);
    const std::string stem = fs::path(image_path).stem().string();
    write_outputs(cfg, stem, result);

    for (const auto& w : result.warnings) std::cerr << stem << ": warning: " << w << "\n";
    std::cout << stem << ": " << result.probes_used << " probe(s), " << ms << " ms\n";
    return 0;
}

int cmd_batch(const RunConfig& cfg) {
    const std::vector<DatasetEntry> entries = pair_dataset(cfg.layout);
    ensure_out_dir(cfg.out_dir);

    unsigned n_workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                         : std::thread::hardware_concurrency();
    n_workers = std::max(1u, std::min<unsigned>(n_workers, entries.size()));

    std::atomic<std::size_t> next{0};
    std::atomic<int> worst{0};
    std::mutex log_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= entries.size()) return;
            const DatasetEntry& entry = entries[i];
            try {
                const auto t0 = std::chrono::steady_clock::now();
                const SegmentationResult result = segment_file(cfg, entry.image, entry.fov);
                const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count();
                write_outputs(cfg, entry.image.stem().string(), result);
                std::lock_guard lock(log_mutex);
                for (const auto& w : result.warnings)
                    std::cerr << entry.id << ": warning: " << w << "\n";
                std::cout << entry.id << ": " << result.probes_used << " probe(s), " << ms
                          << " ms\n";
            } catch (const std::exception& e) {
                const int code = dynamic_cast<const IoError*>(&e) ? kExitIo : kExitPipeline;
                int prev = worst.load();
                while (prev < code && !worst.compare_exchange_weak(prev, code)) {}
                std::lock_guard lock(log_mutex);
                std::cerr << entry.id << ": failed: " << e.what() << "\n";
            }
        }
    };

    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    if (worst.load() != 0)
        std::cerr << "batch finished with failures (" << entries.size() << " images)\n";
    return worst.load();
}

int cmd_eval(const RunConfig& cfg, const std::string& pred_dir) {
    if (cfg.layout.reference_glob.empty())
        throw std::invalid_argument("eval needs a reference glob ('refs' in the configuration)");

    const std::vector<DatasetEntry> entries = pair_dataset(cfg.layout);
    ensure_out_dir(cfg.out_dir);

    std::vector<std::pair<ConfusionCounts, MetricsRecord>> rows;
    std::vector<MetricsRecord> records;
    for (const DatasetEntry& entry : entries) {
        const fs::path pred_path =
            fs::path(pred_dir) / (entry.image.stem().string() + "_vessels.png");
        if (!fs::is_regular_file(pred_path))
            throw IoError("no prediction for stem '" + entry.id + "': expected " +
                          pred_path.string());
        const BinaryMask pred = load_mask(pred_path);
        const BinaryMask ref = load_mask(entry.reference);

        BinaryMask fov(pred.width(), pred.height(), 1);
        if (!cfg.full_frame_eval) {
            if (!entry.fov.empty()) fov = load_mask(entry.fov);
            else fov = fov_from_image(luminance(load_color(entry.image)),
                                      cfg.params.fov_threshold);
        }
        if (!pred.same_size(ref) || !pred.same_size(fov))
            throw IoError("mask dimensions differ for stem '" + entry.id + "'");

        const ConfusionCounts c = confusion(pred, ref, fov);
        const MetricsRecord rec = metrics(c, entry.id);
        rows.emplace_back(c, rec);
        records.push_back(rec);

        if (cfg.save_overlay)
            save_color_png(fs::path(cfg.out_dir) / (entry.id + "_overlay.png"),
                           render_overlay(pred, ref, fov));
    }

    const EvalSummary summary = aggregate(records);
    const fs::path csv_path = fs::path(cfg.out_dir) / "metrics.csv";
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot write " + csv_path.string());
    write_metrics_csv(csv, rows, summary);
    if (!csv) throw IoError("cannot write " + csv_path.string());

    char acc_buf[64];
    std::snprintf(acc_buf, sizeof(acc_buf), "%.4f (%.4f)", summary.mean_acc, summary.acc_std);
    std::cout << "Se " << ratio4(summary.mean_se) << "  Sp " << ratio4(summary.mean_sp)
              << "  Acc " << acc_buf << (summary.count == 1 ? "  [single image]" : "")
              << "\n"
              << "wrote " << csv_path.string() << " (" << summary.count << " image(s))\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Retinal vessel segmentation by three-segment logarithmic probing"};
    app.require_subcommand(1);

    std::string image_path, fov_path, config_path, pred_dir;
    CommonFlags flags;

    CLI::App* segment = app.add_subcommand("segment", "Segment a single fundus image");
    segment->add_option("image", image_path, "input image (PNG, PPM, TIFF, JPEG)")->required();
    segment->add_option("--config", config_path, "run configuration file");
    segment->add_option("--fov", fov_path, "field-of-view mask (computed when absent)");
    flags.attach(segment);

    CLI::App* batch = app.add_subcommand("batch", "Segment every image of a dataset");
    batch->add_option("config", config_path, "run configuration file with an 'images' glob")
        ->required();
    flags.attach(batch);

    CLI::App* eval = app.add_subcommand("eval", "Score predicted masks against references");
    eval->add_option("pred_dir", pred_dir, "directory holding <stem>_vessels.png predictions")
        ->required();
    eval->add_option("config", config_path, "run configuration file with 'images'/'refs' globs")
        ->required();
    flags.attach(eval);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        const CLI::App* cmd = app.get_subcommands().front();
        const RunConfig cfg = make_config(config_path, cmd, flags);
        if (cmd == segment) return cmd_segment(cfg, image_path, fov_path);
        if (cmd == batch) return cmd_batch(cfg);
        return cmd_eval(cfg, pred_dir);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const PipelineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPipeline;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPipeline;
    }
}
