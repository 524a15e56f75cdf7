#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <optional>
#include <stdexcept>

#include "lipvessel/evaluation.hpp"
#include "lipvessel/lip.hpp"
#include "lipvessel/probe.hpp"
#include "lipvessel/segmentation.hpp"
#include "lipvessel/vesselness.hpp"

namespace py = pybind11;
using namespace lipvessel;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ByteArray = py::array_t<uint8_t, py::array::c_style | py::array::forcecast>;

GrayImage to_gray(const DoubleArray& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D float array");
    GrayImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::memcpy(img.pixels().data(), a.data(), sizeof(double) * img.size());
    return img;
}

py::array_t<double> from_gray(const GrayImage& img) {
    py::array_t<double> a({img.height(), img.width()});
    std::memcpy(a.mutable_data(), img.pixels().data(), sizeof(double) * img.size());
    return a;
}

BinaryMask to_mask(const ByteArray& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D mask array");
    BinaryMask mask(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    const uint8_t* src = a.data();
    for (std::size_t i = 0; i < mask.size(); ++i) mask.pixels()[i] = src[i] ? 1 : 0;
    return mask;
}

py::array_t<uint8_t> from_mask(const BinaryMask& mask) {
    py::array_t<uint8_t> a({mask.height(), mask.width()});
    std::memcpy(a.mutable_data(), mask.pixels().data(), mask.size());
    return a;
}

ColorImage to_color(const ByteArray& a) {
    if (a.ndim() != 3 || a.shape(2) != 3)
        throw std::invalid_argument("expected an HxWx3 uint8 array");
    ColorImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    const uint8_t* src = a.data();
    for (std::size_t i = 0; i < img.size(); ++i)
        img.pixels()[i] = {src[3 * i], src[3 * i + 1], src[3 * i + 2]};
    return img;
}

py::array_t<uint8_t> from_color(const ColorImage& img) {
    py::array_t<uint8_t> a({img.height(), img.width(), 3});
    uint8_t* dst = a.mutable_data();
    for (std::size_t i = 0; i < img.size(); ++i) {
        dst[3 * i] = img.pixels()[i].r;
        dst[3 * i + 1] = img.pixels()[i].g;
        dst[3 * i + 2] = img.pixels()[i].b;
    }
    return a;
}

PipelineParams make_params(double area_fraction, double change_limit, int max_probes,
                           int orientation_count, double discard_fraction, double fov_angle,
                           double fov_threshold, bool adapt) {
    PipelineParams p;
    p.area_fraction = area_fraction;
    p.change_limit = change_limit;
    p.max_probes = max_probes;
    p.orientation_count = orientation_count;
    p.discard_fraction = discard_fraction;
    p.fov_angle_deg = fov_angle;
    p.fov_threshold = fov_threshold;
    p.adapt_intensities = adapt;
    return p;
}

// Python-facing view of a finished segmentation (arrays, not C++ images).
struct PyResult {
    py::array_t<uint8_t> mask;
    py::array_t<double> vesselness;
    py::array_t<double> phi;
    int probes_used = 0;
    std::vector<std::string> warnings;
};

PyResult wrap_result(const SegmentationResult& r) {
    return {from_mask(r.mask), from_gray(r.vesselness.values), from_gray(r.normalized.values),
            r.probes_used, r.warnings};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Retinal vessel segmentation by three-segment logarithmic probing";
    m.attr("M") = kLipM;

    m.def("lip_add", &lip_add, py::arg("a"), py::arg("b"),
          "Logarithmic addition of two grey-tone values");
    m.def("lip_sub", &lip_sub, py::arg("a"), py::arg("b"),
          "Logarithmic subtraction; the subtrahend must be below M");

    m.def(
        "luminance",
        [](const ByteArray& rgb) { return from_gray(luminance(to_color(rgb))); },
        py::arg("rgb"), "Rec. 601 luminance of an HxWx3 uint8 image");
    m.def(
        "complement",
        [](const DoubleArray& f) { return from_gray(complement(to_gray(f))); },
        py::arg("f"), "Grey-tone complement (dark structures become peaks)");
    m.def(
        "image_mean",
        [](const DoubleArray& f, const ByteArray& mask) {
            return image_mean(to_gray(f), to_mask(mask));
        },
        py::arg("f"), py::arg("mask"), "Mean value over the set pixels of a mask");

    m.def(
        "kth_min",
        [](const std::vector<double>& values, double discard_fraction) {
            return kth_min(values, discard_fraction);
        },
        py::arg("values"), py::arg("discard_fraction"),
        "Robust minimum: the k-th smallest value with k = floor(discard*n) + 1");

    py::class_<Offset>(m, "Offset")
        .def_readonly("dx", &Offset::dx)
        .def_readonly("dy", &Offset::dy)
        .def("__repr__", [](const Offset& o) {
            return "Offset(" + std::to_string(o.dx) + ", " + std::to_string(o.dy) + ")";
        });

    py::class_<ProbeSpec>(m, "ProbeSpec")
        .def(py::init<double, double, double, double>(), py::arg("width"), py::arg("length"),
             py::arg("center_intensity"), py::arg("side_intensity"))
        .def_readonly("width", &ProbeSpec::width)
        .def_readonly("length", &ProbeSpec::length)
        .def_readonly("center_intensity", &ProbeSpec::center_intensity)
        .def_readonly("side_intensity", &ProbeSpec::side_intensity);

    py::class_<RasterProbe>(m, "RasterProbe")
        .def_readonly("orientation", &RasterProbe::orientation)
        .def_readonly("center", &RasterProbe::center)
        .def_readonly("left", &RasterProbe::left)
        .def_readonly("right", &RasterProbe::right)
        .def_readonly("center_intensity", &RasterProbe::center_intensity)
        .def_readonly("side_intensity", &RasterProbe::side_intensity);

    py::class_<ProbeFamily>(m, "ProbeFamily")
        .def_readonly("probes", &ProbeFamily::probes)
        .def_readonly("orientations", &ProbeFamily::orientations);

    m.def("probe_widths", &probe_widths, py::arg("fov_diameter_px"), py::arg("fov_angle_deg"),
          "The three probe widths derived from the field-of-view geometry");
    m.def(
        "probe_lengths",
        [](const std::vector<double>& widths) { return probe_lengths(widths); },
        py::arg("widths"), "Segment lengths (0.75 x width)");
    m.def("adapt_intensities", &adapt_intensities, py::arg("image_mean"),
          "Probe intensities shifted to the image mean");
    m.def("orientations", &orientations, py::arg("count"),
          "Evenly spaced probe orientations over the full circle");
    m.def("digital_line", &digital_line, py::arg("ex"), py::arg("ey"),
          "Digital segment from the origin to (ex, ey)");
    m.def("rasterize", &rasterize, py::arg("spec"), py::arg("theta"),
          "Pixel offsets of the three probe segments at one orientation");
    m.def(
        "fov_diameter",
        [](const ByteArray& mask) { return fov_diameter(to_mask(mask)); },
        py::arg("mask"), "Mean bounding-box side of the set region");
    m.def(
        "make_probe_family",
        [](double d, double angle, double h_c, double h_lr, int orientation_count) {
            return make_probe_family(d, angle, h_c, h_lr, orientation_count);
        },
        py::arg("fov_diameter_px"), py::arg("fov_angle_deg"), py::arg("center_intensity"),
        py::arg("side_intensity"), py::arg("orientation_count") = kDefaultOrientationCount);

    m.def(
        "profile_detector_1d",
        [](const DoubleArray& profile, int half_width, double left, double center,
           double right) {
            if (profile.ndim() != 1) throw std::invalid_argument("expected a 1-D profile");
            GrayImage row(static_cast<int>(profile.shape(0)), 1);
            std::memcpy(row.pixels().data(), profile.data(), sizeof(double) * row.size());
            const GrayImage out = profile_detector_1d(row, half_width, left, center, right);
            py::array_t<double> a(out.width());
            std::memcpy(a.mutable_data(), out.pixels().data(), sizeof(double) * out.size());
            return a;
        },
        py::arg("profile"), py::arg("half_width"), py::arg("left_intensity"),
        py::arg("center_intensity"), py::arg("right_intensity"),
        "Exact three-point detector on a 1-D profile (NaN where the probe overhangs)");

    m.def(
        "detector_map_orientation",
        [](const DoubleArray& f, const RasterProbe& probe, double discard_fraction,
           const ByteArray& valid) {
            return from_gray(
                detector_map_orientation(to_gray(f), probe, discard_fraction, to_mask(valid)));
        },
        py::arg("f"), py::arg("probe"), py::arg("discard_fraction"), py::arg("valid"));
    m.def(
        "detector_map_probe",
        [](const DoubleArray& f, const ProbeSpec& spec, const std::vector<double>& thetas,
           double discard_fraction, const ByteArray& valid) {
            const DetectorParams params{discard_fraction, thetas};
            return from_gray(detector_map_probe(to_gray(f), spec, params, to_mask(valid)));
        },
        py::arg("f"), py::arg("spec"), py::arg("orientations"), py::arg("discard_fraction"),
        py::arg("valid"));
    m.def(
        "vesselness",
        [](const DoubleArray& f, const ProbeFamily& family, int probe_count,
           double discard_fraction, const ByteArray& valid) {
            const DetectorParams params{discard_fraction, family.orientations};
            return from_gray(
                vesselness_multiscale(to_gray(f), family, probe_count, params, to_mask(valid))
                    .values);
        },
        py::arg("f"), py::arg("family"), py::arg("probe_count"), py::arg("discard_fraction"),
        py::arg("valid"), "Pointwise minimum of the detector maps of the first probes");
    m.def(
        "normalize_map",
        [](const DoubleArray& values, const ByteArray& fov) {
            const VesselnessMap e{to_gray(values), to_mask(fov), 1};
            return from_gray(normalize_map(e).values);
        },
        py::arg("values"), py::arg("fov"),
        "Median-clipped, flipped rescaling onto [0, 1] (high = vessel-like)");
    m.def(
        "threshold_by_area",
        [](const DoubleArray& values, const ByteArray& fov, double fraction) {
            const VesselnessMap e{to_gray(values), to_mask(fov), 1};
            return from_mask(threshold_by_area(e, fraction));
        },
        py::arg("values"), py::arg("fov"), py::arg("fraction"),
        "Keep the lowest fraction of defined values as vessels");
    m.def(
        "remove_small_components",
        [](const ByteArray& mask, double min_area) {
            return from_mask(remove_small_components(to_mask(mask), min_area));
        },
        py::arg("mask"), py::arg("min_area"));
    m.def(
        "fill_small_holes",
        [](const ByteArray& mask) { return from_mask(fill_small_holes(to_mask(mask))); },
        py::arg("mask"));
    m.def(
        "fov_from_image",
        [](const DoubleArray& lum, double threshold) {
            return from_mask(fov_from_image(to_gray(lum), threshold));
        },
        py::arg("lum"), py::arg("threshold") = 20.0);

    py::class_<PyResult>(m, "SegmentationResult")
        .def_readonly("mask", &PyResult::mask)
        .def_readonly("vesselness", &PyResult::vesselness)
        .def_readonly("phi", &PyResult::phi)
        .def_readonly("probes_used", &PyResult::probes_used)
        .def_readonly("warnings", &PyResult::warnings);

    m.def(
        "segment_vessels",
        [](const ByteArray& rgb, const std::optional<ByteArray>& fov, double area_fraction,
           double change_limit, int max_probes, int orientation_count, double discard_fraction,
           double fov_angle, double fov_threshold, bool adapt_intensities) {
            const PipelineParams params =
                make_params(area_fraction, change_limit, max_probes, orientation_count,
                            discard_fraction, fov_angle, fov_threshold, adapt_intensities);
            std::optional<BinaryMask> mask;
            if (fov) mask = to_mask(*fov);
            return wrap_result(segment_vessels(to_color(rgb), mask, params));
        },
        py::arg("rgb"), py::arg("fov") = py::none(), py::kw_only(),
        py::arg("area_fraction") = 0.12, py::arg("change_limit") = 0.40,
        py::arg("max_probes") = 3, py::arg("orientations") = kDefaultOrientationCount,
        py::arg("discard_fraction") = kDefaultDiscardFraction, py::arg("fov_angle") = 45.0,
        py::arg("fov_threshold") = 20.0, py::arg("adapt_intensities") = true,
        "Full pipeline: probes sized from the field of view, automatic probe count,\n"
        "area thresholding and the two mask clean-up passes");

    py::class_<ConfusionCounts>(m, "ConfusionCounts")
        .def_readonly("tp", &ConfusionCounts::tp)
        .def_readonly("tn", &ConfusionCounts::tn)
        .def_readonly("fp", &ConfusionCounts::fp)
        .def_readonly("fn", &ConfusionCounts::fn)
        .def("total", &ConfusionCounts::total);

    py::class_<MetricsRecord>(m, "MetricsRecord")
        .def_readonly("image_id", &MetricsRecord::image_id)
        .def_readonly("se", &MetricsRecord::se)
        .def_readonly("sp", &MetricsRecord::sp)
        .def_readonly("acc", &MetricsRecord::acc);

    py::class_<EvalSummary>(m, "EvalSummary")
        .def_readonly("mean_se", &EvalSummary::mean_se)
        .def_readonly("mean_sp", &EvalSummary::mean_sp)
        .def_readonly("mean_acc", &EvalSummary::mean_acc)
        .def_readonly("acc_std", &EvalSummary::acc_std)
        .def_readonly("count", &EvalSummary::count);

    m.def(
        "confusion",
        [](const ByteArray& pred, const ByteArray& ref, const ByteArray& fov) {
            return confusion(to_mask(pred), to_mask(ref), to_mask(fov));
        },
        py::arg("pred"), py::arg("ref"), py::arg("fov"),
        "Pixel confusion counts inside the field of view");
    m.def("metrics", &metrics, py::arg("counts"), py::arg("image_id") = std::string(),
          "Sensitivity, specificity and accuracy of one image");
    m.def(
        "aggregate",
        [](const std::vector<MetricsRecord>& records) { return aggregate(records); },
        py::arg("records"), "Unweighted means and the sample deviation of the accuracy");
    m.def(
        "render_overlay",
        [](const ByteArray& pred, const ByteArray& ref, const ByteArray& fov) {
            return from_color(render_overlay(to_mask(pred), to_mask(ref), to_mask(fov)));
        },
        py::arg("pred"), py::arg("ref"), py::arg("fov"),
        "Four-colour agreement image: TP black, TN white, FP cyan, FN red");
}
