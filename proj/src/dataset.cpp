#include "lipvessel/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <stdexcept>

#include "lipvessel/errors.hpp"

namespace fs = std::filesystem;

namespace lipvessel {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw IoError("configuration: '" + key + "' expects a number, got '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw IoError("configuration: '" + key + "' expects an integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw IoError("configuration: '" + key + "' expects true/false, got '" + value + "'");
}

// Glob pattern over one filename: * and ? only.
std::regex glob_to_regex(const std::string& pattern) {
    std::string re;
    re.reserve(pattern.size() * 2);
    for (char c : pattern) {
        switch (c) {
            case '*': re += "[^/]*"; break;
            case '?': re += "[^/]"; break;
            default:
                if (std::isalnum(static_cast<unsigned char>(c))) re += c;
                else { re += '\\'; re += c; }
        }
    }
    return std::regex(re);
}

}  // namespace

void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "fov-angle") cfg.params.fov_angle_deg = parse_real(key, value);
    else if (key == "fov-threshold") cfg.params.fov_threshold = parse_real(key, value);
    else if (key == "orientations") cfg.params.orientation_count = parse_int(key, value);
    else if (key == "area-fraction") cfg.params.area_fraction = parse_real(key, value);
    else if (key == "change-limit") cfg.params.change_limit = parse_real(key, value);
    else if (key == "max-probes") cfg.params.max_probes = parse_int(key, value);
    else if (key == "discard-fraction") cfg.params.discard_fraction = parse_real(key, value);
    else if (key == "adapt-intensities") cfg.params.adapt_intensities = parse_bool(key, value);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "save-maps") cfg.save_maps = parse_bool(key, value);
    else if (key == "save-overlay") cfg.save_overlay = parse_bool(key, value);
    else if (key == "full-frame-eval") cfg.full_frame_eval = parse_bool(key, value);
    else if (key == "threads") cfg.threads = parse_int(key, value);
    else if (key == "images") cfg.layout.image_glob = value;
    else if (key == "fovs") cfg.layout.fov_glob = value;
    else if (key == "refs") cfg.layout.reference_glob = value;
    else if (key == "stem-regex") cfg.layout.stem_regex = value;
    else throw IoError("configuration: unknown key '" + key + "'");
}

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read configuration file: " + path.string());

    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw IoError("configuration: line " + std::to_string(lineno) +
                          " of " + path.string() + " is not 'key = value'");
        apply_config_line(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
    if (pattern.empty()) return {};
    const fs::path full(pattern);
    const std::string name = full.filename().string();
    const fs::path dir = full.parent_path().empty() ? fs::path(".") : full.parent_path();
    if (dir.string().find_first_of("*?") != std::string::npos)
        throw IoError("glob: wildcards are only supported in the final path component: " + pattern);

    std::vector<fs::path> out;
    if (name.find_first_of("*?") == std::string::npos) {
        if (fs::is_regular_file(full)) out.push_back(full);
        return out;
    }

    if (!fs::is_directory(dir)) return out;
    const std::regex re = glob_to_regex(name);
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (std::regex_match(entry.path().filename().string(), re))
            out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string pairing_key(const fs::path& file, const std::string& stem_regex) {
    const std::string stem = file.stem().string();
    if (stem_regex.empty()) return stem;
    std::regex re;
    try {
        re.assign(stem_regex);
    } catch (const std::regex_error& e) {
        throw IoError("configuration: invalid stem-regex '" + stem_regex + "': " + e.what());
    }
    std::smatch m;
    if (!std::regex_search(stem, m, re) || m.size() < 2)
        throw IoError("pairing: stem pattern has no capture-group match in '" + stem + "'");
    return m[1].str();
}

std::vector<DatasetEntry> pair_dataset(const DatasetLayout& layout) {
    auto sorted_by_key = [&](const std::string& glob) {
        std::vector<fs::path> files = expand_glob(glob);
        std::stable_sort(files.begin(), files.end(),
                         [&](const fs::path& a, const fs::path& b) {
                             return pairing_key(a, layout.stem_regex) <
                                    pairing_key(b, layout.stem_regex);
                         });
        return files;
    };

    const std::vector<fs::path> images = sorted_by_key(layout.image_glob);
    if (images.empty()) throw IoError("no image matches '" + layout.image_glob + "'");

    auto aligned = [&](const std::string& glob, const char* role) {
        std::vector<fs::path> files = sorted_by_key(glob);
        if (glob.empty()) return files;
        if (files.empty()) throw IoError(std::string("no ") + role + " matches '" + glob + "'");
        if (files.size() != images.size())
            throw IoError(std::string(role) + " count (" + std::to_string(files.size()) +
                          ") does not match image count (" + std::to_string(images.size()) + ")");
        if (!layout.stem_regex.empty()) {
            for (std::size_t i = 0; i < files.size(); ++i) {
                const std::string a = pairing_key(images[i], layout.stem_regex);
                const std::string b = pairing_key(files[i], layout.stem_regex);
                if (a != b)
                    throw IoError(std::string("no ") + role + " paired with image stem '" + a + "'");
            }
        }
        return files;
    };

    const std::vector<fs::path> fovs = aligned(layout.fov_glob, "FOV mask");
    const std::vector<fs::path> refs = aligned(layout.reference_glob, "reference");

    std::vector<DatasetEntry> entries(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        // The key aligns the roles; the id stays the full image stem so it
        // matches the <stem>_vessels.png outputs.
        entries[i].id = images[i].stem().string();
        entries[i].image = images[i];
        if (!fovs.empty()) entries[i].fov = fovs[i];
        if (!refs.empty()) entries[i].reference = refs[i];
    }
    return entries;
}

}  // namespace lipvessel
