#include "arsr/dataset_prep.hpp"

#include <cstdlib>

namespace arsr {

const char* kEncoderEnvVar = "ARSR_ENCODER";

namespace {

void validate(const DatasetPrepSpec& spec) {
    if (spec.bitrate_kbps < 1) {
        throw ContractError("dataset prep bitrate must be positive");
    }
    if (spec.scale_divisor < 1) {
        throw ContractError("dataset prep scale divisor must be positive");
    }
    if (spec.source.empty()) {
        throw ContractError("dataset prep needs a source video path");
    }
}

std::string scale_filter(const DatasetPrepSpec& spec) {
    if (spec.source_res) {
        const int w = spec.source_res->width / spec.scale_divisor;
        const int h = spec.source_res->height / spec.scale_divisor;
        return "scale=" + std::to_string(w) + ":" + std::to_string(h);
    }
    const std::string d = std::to_string(spec.scale_divisor);
    return "scale=iw/" + d + ":ih/" + d;
}

} // namespace

std::vector<std::string> dataset_prep_commands(const DatasetPrepSpec& spec,
                                               const std::string& encoder_bin) {
    validate(spec);
    const std::string src = spec.source.string();
    const std::string out = spec.out_dir.string();
    const std::string lr_video = out + "/lr_source.mp4";

    std::vector<std::string> cmds;
    cmds.push_back(encoder_bin + " -y -i \"" + src + "\" -vf " + scale_filter(spec) + " -c:v " +
                   spec.codec + " -b:v " + std::to_string(spec.bitrate_kbps) + "k \"" +
                   lr_video + "\"");
    cmds.push_back(encoder_bin + " -y -i \"" + lr_video + "\" \"" + out +
                   "/lr/frame_%05d.png\"");
    cmds.push_back(encoder_bin + " -y -i \"" + src + "\" \"" + out + "/hr/frame_%05d.png\"");
    return cmds;
}

void run_dataset_prep(const DatasetPrepSpec& spec) {
    validate(spec);
    const char* encoder = std::getenv(kEncoderEnvVar);
    if (!encoder || *encoder == '\0') {
        throw IoError(std::string("encoder binary not configured: set ") + kEncoderEnvVar +
                      " to the encoder executable (e.g. ffmpeg)");
    }
    if (!std::filesystem::exists(encoder)) {
        throw IoError("encoder binary not found: " + std::string(encoder));
    }
    std::filesystem::create_directories(spec.out_dir / "lr");
    std::filesystem::create_directories(spec.out_dir / "hr");
    for (const std::string& cmd : dataset_prep_commands(spec, encoder)) {
        const int rc = std::system(cmd.c_str());
        if (rc != 0) {
            throw IoError("encoder command failed (exit " + std::to_string(rc) + "): " + cmd);
        }
    }
}

} // namespace arsr
