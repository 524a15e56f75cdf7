#pragma once

#include <stdexcept>
#include <string>

namespace lipvessel {

// File/dataset problems (unreadable image, missing reference, bad glob).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Failures inside the segmentation pipeline (no FOV, degenerate probes, ...).
struct PipelineError : std::runtime_error {
    explicit PipelineError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lipvessel
