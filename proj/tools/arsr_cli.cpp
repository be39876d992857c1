// arsr: single-frame artifacts-reduction and super-resolution toolkit.
//
// Exit codes: 0 success, 1 usage, 2 I/O or environment, 3 file format,
// 4 contract/data violation.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "arsr/dataset_prep.hpp"
#include "arsr/image_io.hpp"
#include "arsr/metrics.hpp"
#include "arsr/model.hpp"
#include "arsr/pipeline.hpp"
#include "arsr/quant.hpp"
#include "arsr/rng.hpp"
#include "arsr/train.hpp"
#include "arsr/weights_io.hpp"
#include "arsr/y4m.hpp"

namespace {

using namespace arsr;

Size parse_size(const std::string& text, const char* what) {
    const auto x = text.find('x');
    if (x == std::string::npos || x == 0 || x + 1 >= text.size()) {
        throw ContractError(std::string(what) + " must look like WxH, got '" + text + "'");
    }
    try {
        return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
    } catch (const std::exception&) {
        throw ContractError(std::string(what) + " must look like WxH, got '" + text + "'");
    }
}

ChromaMethod parse_chroma(const std::string& name) {
    if (name == "nearest") return ChromaMethod::kNearest;
    if (name == "bilinear") return ChromaMethod::kBilinear;
    if (name == "bicubic") return ChromaMethod::kBicubic;
    throw ContractError("unknown chroma method '" + name + "'");
}

ColorMatrix parse_matrix(const std::string& name) {
    if (name == "bt709") return ColorMatrix::kBt709;
    if (name == "bt601") return ColorMatrix::kBt601;
    throw ContractError("unknown color matrix '" + name + "'");
}

bool is_y4m(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return ext == ".y4m";
}

// Frame source abstraction so upscale/eval handle PNG and y4m uniformly.
std::vector<Frame> load_frames(const std::filesystem::path& path, ColorMatrix matrix,
                               VideoHeader* header) {
    std::vector<Frame> frames;
    if (is_y4m(path)) {
        Y4mReader reader(path);
        if (header) *header = reader.header();
        while (auto f = reader.next()) frames.push_back(std::move(*f));
        if (frames.empty()) {
            throw FormatError("no frames in " + path.string());
        }
    } else {
        frames.push_back(image_to_frame(read_png(path), matrix));
    }
    return frames;
}

struct LoadedModel {
    ModelFile file;
    std::optional<QuantizedModel> quant;
};

LoadedModel load_for_inference(const std::filesystem::path& path) {
    LoadedModel m;
    m.file = load_model(path);
    if (m.file.quantized) {
        m.quant = m.file.to_quantized();
    }
    return m;
}

int cmd_upscale(const std::string& in, const std::string& out, const std::string& weights,
                const std::string& target, const std::string& chroma,
                const std::string& matrix) {
    const ChromaMethod method = parse_chroma(chroma);
    const ColorMatrix color = parse_matrix(matrix);
    const Size target_res = parse_size(target, "--target-res");

    VideoHeader header;
    std::vector<Frame> frames = load_frames(in, color, &header);
    const FramePlan p = plan(frames.front().resolution(), target_res);

    std::optional<LoadedModel> model;
    if (p.net_factor > 1) {
        if (weights.empty()) {
            throw ContractError("plan needs an x" + std::to_string(p.net_factor) +
                                " network; pass --weights");
        }
        model = load_for_inference(weights);
    }

    auto run = [&](const Frame& f) {
        if (p.net_factor == 1) return upscale_frame(f, p, method);
        if (model->quant) return upscale_frame(f, p, *model->quant, method);
        return upscale_frame(f, p, model->file.cfg, model->file.weights, method);
    };

    if (is_y4m(std::filesystem::path(out))) {
        header.width = target_res.width;
        header.height = target_res.height;
        Y4mWriter writer(out, header);
        for (const Frame& f : frames) writer.write(run(f));
    } else {
        if (frames.size() != 1) {
            throw ContractError("image output needs a single-frame input");
        }
        const Image src = is_y4m(in) ? Image{} : read_png(in);
        const int channels = is_y4m(in) ? 3 : src.channels;
        write_png(out, frame_to_image(run(frames.front()), color, channels));
    }
    std::cout << "upscaled " << frames.size() << " frame" << (frames.size() == 1 ? "" : "s")
              << " to " << target_res.width << "x" << target_res.height << " (net x"
              << p.net_factor << (p.resample_target ? " + lanczos" : "") << ")\n";
    return 0;
}

int cmd_collapse(const std::string& in, const std::string& out) {
    ModelFile file = load_model(in);
    if (file.weights.form != WeightForm::kExpanded) {
        throw ContractError(in + " does not hold expanded-form weights");
    }
    WeightSet collapsed = collapse(file.cfg, file.weights);
    save_model(out, file.cfg, collapsed);
    std::cout << "collapsed " << file.weights.layers.size() << " convs into "
              << collapsed.layers.size() << " (" << param_count(file.cfg, WeightForm::kExpanded)
              << " -> " << param_count(file.cfg, WeightForm::kCollapsed) << " parameters)\n";
    return 0;
}

int cmd_quantize(const std::string& weights, int bits, bool pow2, const std::string& calib_dir,
                 const std::string& out, const std::string& matrix) {
    ModelFile file = load_model(weights);
    if (file.weights.form != WeightForm::kCollapsed) {
        throw ContractError("quantize needs collapsed weights; run collapse first");
    }
    const ColorMatrix color = parse_matrix(matrix);

    std::vector<Tensor> calib;
    std::vector<std::filesystem::path> entries;
    if (!std::filesystem::is_directory(calib_dir)) {
        throw IoError("calibration directory not found: " + calib_dir);
    }
    for (const auto& entry : std::filesystem::directory_iterator(calib_dir)) {
        if (entry.path().extension() == ".png") entries.push_back(entry.path());
    }
    std::sort(entries.begin(), entries.end());
    for (const auto& path : entries) {
        calib.push_back(image_to_frame(read_png(path), color).y);
    }
    if (calib.empty()) {
        throw ContractError("no .png calibration images in " + calib_dir);
    }

    QuantizedModel qm = quantize_model(file.cfg, file.weights, bits, pow2, calib);
    save_model(out, qm);
    std::cout << "quantized to " << bits << "-bit" << (pow2 ? " power-of-two" : "")
              << " grids over " << calib.size() << " calibration image"
              << (calib.size() == 1 ? "" : "s") << "\n";
    return 0;
}

// Key-value config file shared by train-toy: model fields plus trainer
// fields, one "key value" pair per line, '#' comments.
void apply_config_file(const std::string& path, ModelConfig& cfg, TrainConfig& tcfg,
                       int& patches_per_image) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file " + path);
    }
    bool feat_kernels_given = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream tokens(line);
        std::string key, value;
        if (!(tokens >> key)) continue;
        if (!(tokens >> value)) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": key '" + key +
                              "' has no value");
        }
        try {
            if (key == "n_feat") cfg.n_feat = std::stoi(value);
            else if (key == "n_map") cfg.n_map = std::stoi(value);
            else if (key == "base_channels") cfg.base_channels = std::stoi(value);
            else if (key == "expansion") cfg.expansion = std::stoi(value);
            else if (key == "map_kernel") cfg.map_kernel = std::stoi(value);
            else if (key == "groups") cfg.groups = std::stoi(value);
            else if (key == "scale") cfg.scale = std::stoi(value);
            else if (key == "final_kernel") cfg.final_kernel = std::stoi(value);
            else if (key == "feat_kernels") {
                cfg.feat_kernels.clear();
                std::istringstream list(value);
                std::string item;
                while (std::getline(list, item, ',')) cfg.feat_kernels.push_back(std::stoi(item));
                feat_kernels_given = true;
            } else if (key == "lr") tcfg.lr = std::stof(value);
            else if (key == "momentum") tcfg.momentum = std::stof(value);
            else if (key == "epochs") tcfg.epochs = std::stoi(value);
            else if (key == "batch") tcfg.batch = std::stoi(value);
            else if (key == "patch") tcfg.patch = std::stoi(value);
            else if (key == "seed") tcfg.seed = std::stoull(value);
            else if (key == "patches_per_image") patches_per_image = std::stoi(value);
            else throw FormatError(path + ":" + std::to_string(lineno) + ": unknown key '" +
                                   key + "'");
        } catch (const FormatError&) {
            throw;
        } catch (const std::exception&) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": bad value '" + value +
                              "' for key '" + key + "'");
        }
    }
    if (!feat_kernels_given) {
        cfg.feat_kernels = default_feat_kernels(cfg.n_feat);
    }
}

int cmd_train_toy(const std::string& data_dir, const std::string& config,
                  const std::string& loss_name, const std::string& out_weights,
                  const std::string& history_csv, const std::string& matrix) {
    ModelConfig cfg;
    cfg.n_feat = 1;
    cfg.feat_kernels = {5};
    cfg.n_map = 1;
    cfg.base_channels = 4;
    cfg.expansion = 8;
    cfg.scale = 2;
    TrainConfig tcfg;
    int patches_per_image = 4;
    if (!config.empty()) {
        apply_config_file(config, cfg, tcfg, patches_per_image);
    }
    cfg.validate();

    LossSpec spec;
    if (loss_name == "mae") spec.kind = LossKind::kMae;
    else if (loss_name == "mse") spec.kind = LossKind::kMse;
    else if (loss_name == "huber") spec.kind = LossKind::kHuber;
    else throw ContractError("unknown loss '" + loss_name + "'");

    const ColorMatrix color = parse_matrix(matrix);
    const std::filesystem::path lr_dir = std::filesystem::path(data_dir) / "lr";
    const std::filesystem::path hr_dir = std::filesystem::path(data_dir) / "hr";
    if (!std::filesystem::is_directory(lr_dir) || !std::filesystem::is_directory(hr_dir)) {
        throw IoError("training data needs " + data_dir + "/lr and " + data_dir + "/hr");
    }
    std::vector<std::filesystem::path> names;
    for (const auto& entry : std::filesystem::directory_iterator(lr_dir)) {
        if (entry.path().extension() == ".png") names.push_back(entry.path().filename());
    }
    std::sort(names.begin(), names.end());
    if (names.empty()) {
        throw DataError("no .png files in " + lr_dir.string());
    }

    // Fixed crops: positions drawn once from the seed, identical every run.
    SplitMix64 crops(tcfg.seed ^ 0xC0FFEEULL);
    const int r = cfg.scale;
    const int ps = tcfg.patch;
    std::vector<std::pair<Tensor, Tensor>> pairs;
    for (const auto& name : names) {
        const Tensor lr_plane = image_to_frame(read_png(lr_dir / name), color).y;
        const auto hr_path = hr_dir / name;
        if (!std::filesystem::exists(hr_path)) {
            throw DataError("missing HR counterpart for " + name.string());
        }
        const Tensor hr_plane = image_to_frame(read_png(hr_path), color).y;
        if (hr_plane.height != lr_plane.height * r || hr_plane.width != lr_plane.width * r) {
            throw DataError(name.string() + ": HR " + hr_plane.shape_str() + " is not x" +
                            std::to_string(r) + " of LR " + lr_plane.shape_str());
        }
        if (lr_plane.height < ps || lr_plane.width < ps) {
            throw DataError(name.string() + " is smaller than the patch size " +
                            std::to_string(ps));
        }
        for (int k = 0; k < patches_per_image; ++k) {
            const int oy = static_cast<int>(crops.below(lr_plane.height - ps + 1));
            const int ox = static_cast<int>(crops.below(lr_plane.width - ps + 1));
            Tensor lp(1, 1, ps, ps), hp(1, 1, ps * r, ps * r);
            for (int y = 0; y < ps; ++y)
                for (int x = 0; x < ps; ++x) lp.at(0, 0, y, x) = lr_plane.at(0, 0, oy + y, ox + x);
            for (int y = 0; y < ps * r; ++y)
                for (int x = 0; x < ps * r; ++x)
                    hp.at(0, 0, y, x) = hr_plane.at(0, 0, oy * r + y, ox * r + x);
            pairs.emplace_back(std::move(lp), std::move(hp));
        }
    }

    FitResult result = fit(cfg, tcfg, spec, pairs);
    save_model(out_weights, cfg, result.weights);
    if (!history_csv.empty()) {
        std::ofstream csv(history_csv);
        if (!csv) {
            throw IoError("cannot open " + history_csv + " for writing");
        }
        csv << "epoch,mean_loss\n";
        for (std::size_t i = 0; i < result.history.size(); ++i) {
            csv << (i + 1) << "," << result.history[i] << "\n";
        }
    }
    std::cout << "trained on " << pairs.size() << " patches for " << tcfg.epochs
              << " epochs; loss " << result.history.front() << " -> " << result.history.back()
              << "\n";
    return 0;
}

int cmd_eval(const std::string& ref, const std::string& test, const std::string& metric,
             const std::string& matrix) {
    if (metric != "psnr" && metric != "ssim") {
        throw ContractError("unknown metric '" + metric + "'");
    }
    const ColorMatrix color = parse_matrix(matrix);
    std::vector<Frame> a = load_frames(ref, color, nullptr);
    std::vector<Frame> b = load_frames(test, color, nullptr);
    if (a.size() != b.size()) {
        throw DataError("frame count mismatch: " + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double score =
            metric == "psnr" ? psnr(a[i].y, b[i].y) : ssim(a[i].y, b[i].y);
        std::cout << "frame " << i << ": " << score << "\n";
        total += score;
    }
    std::cout << "mean " << metric << ": " << total / static_cast<double>(a.size()) << "\n";
    return 0;
}

int cmd_dataset_prep(const std::string& src, int bitrate, int divisor, const std::string& codec,
                     const std::string& src_res, const std::string& out_dir, bool execute) {
    DatasetPrepSpec spec;
    spec.source = src;
    spec.bitrate_kbps = bitrate;
    spec.scale_divisor = divisor;
    spec.codec = codec;
    spec.out_dir = out_dir;
    if (!src_res.empty()) {
        spec.source_res = parse_size(src_res, "--src-res");
    }
    if (execute) {
        run_dataset_prep(spec);
        std::cout << "dataset written under " << out_dir << "\n";
    } else {
        for (const std::string& cmd : dataset_prep_commands(spec)) {
            std::cout << cmd << "\n";
        }
    }
    return 0;
}

int cmd_info(const std::string& weights) {
    const ModelFile file = load_model(weights);
    const ModelConfig& cfg = file.cfg;
    std::cout << "file: " << weights << "\n";
    std::cout << "form: "
              << (file.weights.form == WeightForm::kCollapsed ? "collapsed" : "expanded") << "\n";
    if (file.quantized) {
        std::cout << "quantized: yes (" << file.bits << "-bit"
                  << (file.pow2 ? ", power-of-two scales" : "") << ")\n";
    } else {
        std::cout << "quantized: no\n";
    }
    std::cout << "config: n_feat=" << cfg.n_feat << " n_map=" << cfg.n_map
              << " base_channels=" << cfg.base_channels << " expansion=" << cfg.expansion
              << " feat_kernels=";
    for (std::size_t i = 0; i < cfg.feat_kernels.size(); ++i) {
        if (i) std::cout << ",";
        std::cout << cfg.feat_kernels[i];
    }
    std::cout << " map_kernel=" << cfg.map_kernel << " groups=" << cfg.groups
              << " scale=" << cfg.scale << " final_kernel=" << cfg.final_kernel << "\n";
    std::cout << "convs: " << file.weights.layers.size() << "\n";
    std::cout << "parameters: " << param_count(cfg, file.weights.form) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-frame artifacts-reduction and super-resolution toolkit"};
    app.require_subcommand(1);

    // upscale
    auto* up = app.add_subcommand("upscale", "Upscale a PNG image or y4m stream");
    std::string up_in, up_out, up_weights, up_target, up_chroma = "bilinear",
                up_matrix = "bt709";
    up->add_option("--in", up_in, "Input .png or .y4m")->required();
    up->add_option("--out", up_out, "Output .png or .y4m")->required();
    up->add_option("--weights", up_weights, "Weight file (needed unless the plan is Lanczos-only)");
    up->add_option("--target-res", up_target, "Target resolution WxH")->required();
    up->add_option("--chroma", up_chroma, "Chroma interpolation: nearest|bilinear|bicubic");
    up->add_option("--matrix", up_matrix, "Color matrix for PNG conversion: bt709|bt601");

    // collapse
    auto* col = app.add_subcommand("collapse", "Fold expanded training weights for inference");
    std::string col_in, col_out;
    col->add_option("--in-weights", col_in, "Expanded weight file")->required();
    col->add_option("--out-weights", col_out, "Collapsed output file")->required();

    // quantize
    auto* qz = app.add_subcommand("quantize", "Post-training quantization of collapsed weights");
    std::string qz_weights, qz_calib, qz_out, qz_matrix = "bt709";
    int qz_bits = 12;
    bool qz_pow2 = false;
    qz->add_option("--weights", qz_weights, "Collapsed weight file")->required();
    qz->add_option("--bits", qz_bits, "Bit width (2-16, default 12)");
    qz->add_flag("--pow2", qz_pow2, "Constrain scales to powers of two");
    qz->add_option("--calib", qz_calib, "Directory of calibration .png images")->required();
    qz->add_option("--out", qz_out, "Quantized output file")->required();
    qz->add_option("--matrix", qz_matrix, "Color matrix: bt709|bt601");

    // train-toy
    auto* tr = app.add_subcommand("train-toy", "Desk-scale trainer over lr/ + hr/ patch pairs");
    std::string tr_data, tr_config, tr_loss = "mse", tr_out, tr_history, tr_matrix = "bt709";
    tr->add_option("--data", tr_data, "Directory holding lr/ and hr/ PNG pairs")->required();
    tr->add_option("--config", tr_config, "Key-value config file (model + trainer fields)");
    tr->add_option("--loss", tr_loss, "Loss: mae|mse|huber");
    tr->add_option("--out-weights", tr_out, "Expanded weight output file")->required();
    tr->add_option("--history", tr_history, "CSV loss history output");
    tr->add_option("--matrix", tr_matrix, "Color matrix: bt709|bt601");

    // eval
    auto* ev = app.add_subcommand(
        "eval", "Compare two images or streams on the luma plane (PSNR/SSIM); for perceptual "
                "scores hand the same two files to an external VMAF tool, e.g. "
                "ffmpeg -i test -i ref -lavfi libvmaf -f null -");
    std::string ev_ref, ev_test, ev_metric = "psnr", ev_matrix = "bt709";
    ev->add_option("--ref", ev_ref, "Reference .png or .y4m")->required();
    ev->add_option("--test", ev_test, "Test .png or .y4m")->required();
    ev->add_option("--metric", ev_metric, "Metric: psnr|ssim");
    ev->add_option("--matrix", ev_matrix, "Color matrix: bt709|bt601");

    // dataset-prep
    auto* dp = app.add_subcommand("dataset-prep",
                                  "Emit (or run) encoder commands that build LR/HR pairs");
    std::string dp_src, dp_codec = "libx265", dp_res, dp_out = ".";
    int dp_bitrate = 50, dp_divisor = 4;
    bool dp_exec = false;
    dp->add_option("--src", dp_src, "Source video")->required();
    dp->add_option("--bitrate", dp_bitrate, "LR bitrate in kbps (default 50)");
    dp->add_option("--divisor", dp_divisor, "Downscale divisor (default 4)");
    dp->add_option("--codec", dp_codec, "Encoder codec (default libx265)");
    dp->add_option("--src-res", dp_res, "Source resolution WxH (makes the scale explicit)");
    dp->add_option("--out-dir", dp_out, "Output directory for generated files");
    dp->add_flag("--execute", dp_exec,
                 "Run the commands with the binary named by ARSR_ENCODER");

    // info
    auto* in = app.add_subcommand("info", "Print a weight file's manifest and parameter count");
    std::string in_weights;
    in->add_option("--weights", in_weights, "Weight file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (up->parsed()) {
            return cmd_upscale(up_in, up_out, up_weights, up_target, up_chroma, up_matrix);
        }
        if (col->parsed()) return cmd_collapse(col_in, col_out);
        if (qz->parsed()) {
            return cmd_quantize(qz_weights, qz_bits, qz_pow2, qz_calib, qz_out, qz_matrix);
        }
        if (tr->parsed()) {
            return cmd_train_toy(tr_data, tr_config, tr_loss, tr_out, tr_history, tr_matrix);
        }
        if (ev->parsed()) return cmd_eval(ev_ref, ev_test, ev_metric, ev_matrix);
        if (dp->parsed()) {
            return cmd_dataset_prep(dp_src, dp_bitrate, dp_divisor, dp_codec, dp_res, dp_out,
                                    dp_exec);
        }
        if (in->parsed()) return cmd_info(in_weights);
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 1;
}
