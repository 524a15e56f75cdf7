#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lipvessel/segmentation.hpp"

namespace lipvessel {

// A DRIVE-style directory layout: one glob per role, files paired one-to-one
// by sorted stem (optionally a regex whose first capture group extracts the
// pairing key from the stem).
struct DatasetLayout {
    std::string image_glob;
    std::string fov_glob;        // empty: FOV computed from each image
    std::string reference_glob;  // empty: no references
    std::string stem_regex;      // empty: pair by sorted order
};

struct RunConfig {
    PipelineParams params;
    DatasetLayout layout;
    std::string out_dir = ".";
    bool save_maps = false;
    bool save_overlay = true;
    bool full_frame_eval = false;
    int threads = 0;  // 0 = hardware concurrency
};

// Flat key = value text, '#' comments. Keys mirror the CLI flags
// (fov-angle, area-fraction, ...) plus images/fovs/refs/stem-regex.
RunConfig load_run_config(const std::filesystem::path& path);
void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value);

// Wildcards (*, ?) in the final path component only; returns matches sorted
// by filename.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

// Stem (filename without extension), reduced by stem_regex when given.
std::string pairing_key(const std::filesystem::path& file, const std::string& stem_regex);

struct DatasetEntry {
    std::string id;  // image stem
    std::filesystem::path image;
    std::filesystem::path fov;        // empty if layout has no fov glob
    std::filesystem::path reference;  // empty if layout has no reference glob
};

// Expand the layout's globs and align the sorted lists one-to-one. Throws
// IoError when a glob is empty or the counts disagree.
std::vector<DatasetEntry> pair_dataset(const DatasetLayout& layout);

}  // namespace lipvessel
