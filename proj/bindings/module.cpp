// Python bindings for the toolkit's core operations: box geometry, quadrant
// tiling, label files, fold splitting, matching and voting, and the
// synthetic plate generator. Images cross the boundary as numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <sstream>

#include "platekit/datasetgen.hpp"
#include "platekit/detadapt.hpp"
#include "platekit/errors.hpp"
#include "platekit/evalkit.hpp"
#include "platekit/image.hpp"
#include "platekit/ingest.hpp"
#include "platekit/maskimport.hpp"
#include "platekit/rng.hpp"
#include "platekit/synth.hpp"
#include "platekit/tiler.hpp"
#include "platekit/types.hpp"

namespace py = pybind11;
using namespace platekit;

namespace {

py::array_t<uint16_t> gray_to_numpy(const GrayImage& img) {
    py::array_t<uint16_t> out({img.height, img.width});
    std::memcpy(out.mutable_data(), img.samples.data(), img.samples.size() * sizeof(uint16_t));
    return out;
}

GrayImage gray_from_numpy(const py::array_t<uint16_t, py::array::c_style | py::array::forcecast>& a,
                          int bit_depth) {
    if (a.ndim() != 2) throw ValidationError("expected a 2-D uint16 array");
    GrayImage img;
    img.height = static_cast<int>(a.shape(0));
    img.width = static_cast<int>(a.shape(1));
    img.bit_depth = bit_depth;
    img.samples.assign(a.data(), a.data() + a.size());
    return img;
}

py::array_t<uint8_t> rgb_to_numpy(const RgbImage& img) {
    py::array_t<uint8_t> out({img.height, img.width, 3});
    std::memcpy(out.mutable_data(), img.samples.data(), img.samples.size());
    return out;
}

py::array_t<uint32_t> mask_to_numpy(const InstanceMask& mask) {
    py::array_t<uint32_t> out({mask.height, mask.width});
    std::memcpy(out.mutable_data(), mask.labels.data(), mask.labels.size() * sizeof(uint32_t));
    return out;
}

InstanceMask mask_from_numpy(
    const py::array_t<uint32_t, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw ValidationError("expected a 2-D uint32 array");
    InstanceMask mask;
    mask.height = static_cast<int>(a.shape(0));
    mask.width = static_cast<int>(a.shape(1));
    mask.labels.assign(a.data(), a.data() + a.size());
    return mask;
}

std::string quad_repr(const char* name, double a, double b, double c, double d) {
    std::ostringstream os;
    os << name << "(" << a << ", " << b << ", " << c << ", " << d << ")";
    return os.str();
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Core operations of the platekit microscopy pipeline";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    py::enum_<Quadrant>(m, "Quadrant")
        .value("TL", Quadrant::TL)
        .value("TR", Quadrant::TR)
        .value("BL", Quadrant::BL)
        .value("BR", Quadrant::BR);

    py::class_<BBoxPx>(m, "BBoxPx")
        .def(py::init<>())
        .def(py::init([](double x0, double y0, double x1, double y1) {
                 return BBoxPx{x0, y0, x1, y1};
             }),
             py::arg("x_min"), py::arg("y_min"), py::arg("x_max"), py::arg("y_max"))
        .def_readwrite("x_min", &BBoxPx::x_min)
        .def_readwrite("y_min", &BBoxPx::y_min)
        .def_readwrite("x_max", &BBoxPx::x_max)
        .def_readwrite("y_max", &BBoxPx::y_max)
        .def("width", &BBoxPx::width)
        .def("height", &BBoxPx::height)
        .def("area", &BBoxPx::area)
        .def("__repr__", [](const BBoxPx& b) {
            return quad_repr("BBoxPx", b.x_min, b.y_min, b.x_max, b.y_max);
        });

    py::class_<NormBBox>(m, "NormBBox")
        .def(py::init<>())
        .def(py::init([](double cx, double cy, double w, double h) {
                 return NormBBox{cx, cy, w, h};
             }),
             py::arg("cx"), py::arg("cy"), py::arg("w"), py::arg("h"))
        .def_readwrite("cx", &NormBBox::cx)
        .def_readwrite("cy", &NormBBox::cy)
        .def_readwrite("w", &NormBBox::w)
        .def_readwrite("h", &NormBBox::h)
        .def("__repr__", [](const NormBBox& b) {
            return quad_repr("NormBBox", b.cx, b.cy, b.w, b.h);
        });

    py::class_<ImageMeta>(m, "ImageMeta")
        .def(py::init([](int width, int height, int plate_id, const std::string& well,
                         std::optional<Quadrant> tile) {
                 return ImageMeta{width, height, plate_id, well, tile};
             }),
             py::arg("width"), py::arg("height"), py::arg("plate_id") = 0, py::arg("well") = "",
             py::arg("tile") = std::nullopt)
        .def_readwrite("width", &ImageMeta::width)
        .def_readwrite("height", &ImageMeta::height)
        .def_readwrite("plate_id", &ImageMeta::plate_id)
        .def_readwrite("well", &ImageMeta::well)
        .def_readwrite("tile", &ImageMeta::tile);

    py::class_<Annotation>(m, "Annotation")
        .def(py::init([](int class_id, const NormBBox& box) {
                 return Annotation{class_id, box};
             }),
             py::arg("class_id"), py::arg("box"))
        .def_readwrite("class_id", &Annotation::class_id)
        .def_readwrite("box", &Annotation::box);

    py::class_<Detection>(m, "Detection")
        .def(py::init([](int class_id, const NormBBox& box, double confidence) {
                 return Detection{class_id, box, confidence};
             }),
             py::arg("class_id"), py::arg("box"), py::arg("confidence"))
        .def_readwrite("class_id", &Detection::class_id)
        .def_readwrite("box", &Detection::box)
        .def_readwrite("confidence", &Detection::confidence);

    py::class_<PlateRecord>(m, "PlateRecord")
        .def(py::init([](int plate_id, const std::string& well, const std::string& class_label,
                         const std::string& bf_path, const std::string& gfp_path) {
                 return PlateRecord{plate_id, well, class_label, bf_path, gfp_path};
             }),
             py::arg("plate_id"), py::arg("well"), py::arg("class_label"),
             py::arg("bf_path") = "", py::arg("gfp_path") = "")
        .def_readwrite("plate_id", &PlateRecord::plate_id)
        .def_readwrite("well", &PlateRecord::well)
        .def_readwrite("class_label", &PlateRecord::class_label)
        .def_readwrite("bf_path", &PlateRecord::bf_path)
        .def_readwrite("gfp_path", &PlateRecord::gfp_path);

    py::class_<ClassSet>(m, "ClassSet")
        .def(py::init<std::vector<std::string>>(), py::arg("names"))
        .def("__len__", &ClassSet::size)
        .def("name", &ClassSet::name, py::arg("class_id"))
        .def("names", &ClassSet::names)
        .def("find", &ClassSet::find, py::arg("name"))
        .def("__contains__",
             [](const ClassSet& c, const std::string& name) { return c.contains(name); });

    m.def("to_norm", &to_norm, py::arg("box"), py::arg("meta"));
    m.def("to_px", &to_px, py::arg("box"), py::arg("meta"));
    m.def("iou", py::overload_cast<const BBoxPx&, const BBoxPx&>(&iou), py::arg("a"),
          py::arg("b"));
    m.def("iou_norm", py::overload_cast<const NormBBox&, const NormBBox&>(&iou), py::arg("a"),
          py::arg("b"));
    m.def("derive_seed", &derive_seed, py::arg("base"), py::arg("domain"), py::arg("index") = 0);

    py::class_<TileSpec>(m, "TileSpec")
        .def_readonly("tag", &TileSpec::tag)
        .def_readonly("offset_x", &TileSpec::offset_x)
        .def_readonly("offset_y", &TileSpec::offset_y)
        .def_readonly("width", &TileSpec::width)
        .def_readonly("height", &TileSpec::height);

    m.def("quadrants", &quadrants, py::arg("meta"));
    m.def(
        "remap_annotations",
        [](const std::vector<Annotation>& annos, const ImageMeta& meta, const TileSpec& tile,
           bool clip) {
            const RemapResult r = remap_annotations(annos, meta, tile, clip);
            return py::make_tuple(r.kept, r.straddling);
        },
        py::arg("annotations"), py::arg("meta"), py::arg("tile"), py::arg("clip") = false,
        "Returns (kept, straddling_count) for one tile");
    m.def("straddles_cut", &straddles_cut, py::arg("annotation"), py::arg("meta"));

    m.def("write_label_file", &write_label_file, py::arg("annotations"));
    m.def("read_label_file", &read_label_file, py::arg("text"), py::arg("class_count"));
    m.def("quantize_confidence", &quantize_confidence, py::arg("confidence"));

    py::class_<FoldAssignment>(m, "FoldAssignment")
        .def_readonly("k", &FoldAssignment::k)
        .def("fold_of", &FoldAssignment::fold_of, py::arg("record"))
        .def("as_dict", [](const FoldAssignment& f) {
            py::dict d;
            for (const auto& [key, fold] : f.map)
                d[py::make_tuple(key.first, key.second)] = fold;
            return d;
        });

    m.def("make_folds", &make_folds, py::arg("records"), py::arg("k"), py::arg("seed"));
    m.def("split_train_valid", &split_train_valid, py::arg("records"), py::arg("frac"),
          py::arg("seed"));

    py::class_<MatchPair>(m, "MatchPair")
        .def_readonly("gt_index", &MatchPair::gt_index)
        .def_readonly("det_index", &MatchPair::det_index)
        .def_readonly("iou", &MatchPair::iou);

    py::class_<MatchResult>(m, "MatchResult")
        .def_readonly("pairs", &MatchResult::pairs)
        .def_readonly("unmatched_gt", &MatchResult::unmatched_gt)
        .def_readonly("unmatched_det", &MatchResult::unmatched_det);

    m.def("match", &match, py::arg("ground_truth"), py::arg("detections"),
          py::arg("iou_thresh") = 0.5, py::arg("class_aware") = false);
    m.def("average_precision", &average_precision, py::arg("ground_truth"),
          py::arg("detections"), py::arg("class_id"), py::arg("iou_thresh") = 0.5);

    py::class_<VoteOutcome>(m, "VoteOutcome")
        .def_readonly("class_id", &VoteOutcome::class_id)
        .def_readonly("counts", &VoteOutcome::counts)
        .def_readonly("confidence_sums", &VoteOutcome::confidence_sums);

    m.def("majority_vote", &majority_vote, py::arg("detections"), py::arg("classes"));
    m.def("plate_vote_from_tiles", &plate_vote_from_tiles, py::arg("tile_detections"),
          py::arg("classes"));

    py::class_<CellBox>(m, "CellBox")
        .def_readonly("instance_id", &CellBox::instance_id)
        .def_readonly("box", &CellBox::box)
        .def_readonly("area_px", &CellBox::area_px);

    m.def(
        "instances_to_boxes",
        [](const py::array_t<uint32_t, py::array::c_style | py::array::forcecast>& mask) {
            return instances_to_boxes(mask_from_numpy(mask));
        },
        py::arg("mask"), "Tight bounding boxes of the labeled instances in a uint32 mask");
    m.def("expand_box", &expand_box, py::arg("box"), py::arg("margin_frac"), py::arg("bounds"));
    m.def("boxes_to_annotations", &boxes_to_annotations, py::arg("boxes"), py::arg("class_id"),
          py::arg("meta"));

    m.def(
        "percentile_stretch",
        [](const py::array_t<uint16_t, py::array::c_style | py::array::forcecast>& img,
           double p_low, double p_high) {
            return gray_to_numpy(percentile_stretch(gray_from_numpy(img, 16), p_low, p_high));
        },
        py::arg("image"), py::arg("p_low") = 1.0, py::arg("p_high") = 99.0);
    m.def(
        "merge_channels",
        [](const py::array_t<uint16_t, py::array::c_style | py::array::forcecast>& bf,
           const py::array_t<uint16_t, py::array::c_style | py::array::forcecast>& gfp) {
            return rgb_to_numpy(merge_channels(gray_from_numpy(bf, 8), gray_from_numpy(gfp, 8)));
        },
        py::arg("bf"), py::arg("gfp"),
        "Merge 8-bit BF and GFP planes (values 0..255 in uint16 arrays) into RGB");

    py::enum_<GfpPattern>(m, "GfpPattern")
        .value("Rim", GfpPattern::Rim)
        .value("Punctate", GfpPattern::Punctate)
        .value("Filled", GfpPattern::Filled)
        .value("InnerDisc", GfpPattern::InnerDisc);

    m.def("pattern_for_class", &pattern_for_class, py::arg("class_id"));

    py::class_<SynthConfig>(m, "SynthConfig")
        .def(py::init<>())
        .def_readwrite("seed", &SynthConfig::seed)
        .def_readwrite("width", &SynthConfig::width)
        .def_readwrite("height", &SynthConfig::height)
        .def_readwrite("min_cells", &SynthConfig::min_cells)
        .def_readwrite("max_cells", &SynthConfig::max_cells)
        .def_readwrite("min_radius_px", &SynthConfig::min_radius_px)
        .def_readwrite("max_radius_px", &SynthConfig::max_radius_px)
        .def_readwrite("max_overlap", &SynthConfig::max_overlap)
        .def_readwrite("class_id", &SynthConfig::class_id)
        .def_readwrite("pattern", &SynthConfig::pattern)
        .def_readwrite("bf_background", &SynthConfig::bf_background)
        .def_readwrite("gfp_background", &SynthConfig::gfp_background)
        .def_readwrite("bf_amplitude", &SynthConfig::bf_amplitude)
        .def_readwrite("gfp_amplitude", &SynthConfig::gfp_amplitude)
        .def_readwrite("pixel_noise", &SynthConfig::pixel_noise)
        .def("validate", &SynthConfig::validate);

    py::class_<EllipseCell>(m, "EllipseCell")
        .def_readonly("cx", &EllipseCell::cx)
        .def_readonly("cy", &EllipseCell::cy)
        .def_readonly("rx", &EllipseCell::rx)
        .def_readonly("ry", &EllipseCell::ry);

    py::class_<SynthPlate>(m, "SynthPlate")
        .def_property_readonly("bf", [](const SynthPlate& p) { return gray_to_numpy(p.bf); })
        .def_property_readonly("gfp", [](const SynthPlate& p) { return gray_to_numpy(p.gfp); })
        .def_property_readonly("mask", [](const SynthPlate& p) { return mask_to_numpy(p.mask); })
        .def_readonly("annotations", &SynthPlate::annos)
        .def_readonly("cells", &SynthPlate::cells);

    m.def("gen_plate", &gen_plate, py::arg("config"));

    py::class_<NoiseConfig>(m, "NoiseConfig")
        .def(py::init<>())
        .def_readwrite("seed", &NoiseConfig::seed)
        .def_readwrite("n_classes", &NoiseConfig::n_classes)
        .def_readwrite("drop_prob", &NoiseConfig::drop_prob)
        .def_readwrite("jitter_sigma_px", &NoiseConfig::jitter_sigma_px)
        .def_readwrite("fp_rate", &NoiseConfig::fp_rate)
        .def_readwrite("class_confusion", &NoiseConfig::class_confusion)
        .def_readwrite("confidence_correct_mean", &NoiseConfig::confidence_correct_mean)
        .def_readwrite("confidence_error_mean", &NoiseConfig::confidence_error_mean)
        .def_readwrite("confidence_spread", &NoiseConfig::confidence_spread)
        .def_readwrite("fp_min_size_px", &NoiseConfig::fp_min_size_px)
        .def_readwrite("fp_max_size_px", &NoiseConfig::fp_max_size_px)
        .def("validate", &NoiseConfig::validate);

    m.def("mock_detect", &mock_detect, py::arg("annotations"), py::arg("noise"), py::arg("meta"));

    m.attr("__version__") = "0.1.0";
}
