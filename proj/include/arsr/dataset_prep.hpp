#ifndef ARSR_DATASET_PREP_HPP
#define ARSR_DATASET_PREP_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arsr/resample.hpp"

namespace arsr {

// Recipe for building LR/HR training pairs from a source video: the LR side
// is downscaled by scale_divisor and compressed at a low bitrate, the HR
// side is the untouched source, and frames are extracted from both.
struct DatasetPrepSpec {
    std::filesystem::path source;
    int bitrate_kbps = 50;
    int scale_divisor = 4;
    std::optional<Size> source_res;  // when known, the scale argument is explicit
    std::string codec = "libx265";
    std::filesystem::path out_dir = ".";
};

// Pure command generation; never touches the filesystem.
std::vector<std::string> dataset_prep_commands(const DatasetPrepSpec& spec,
                                               const std::string& encoder_bin = "ffmpeg");

// Name of the environment variable holding the encoder binary path.
extern const char* kEncoderEnvVar;

// Executes the generated commands with the encoder named by ARSR_ENCODER.
// Throws IoError naming the binary when it is missing.
void run_dataset_prep(const DatasetPrepSpec& spec);

} // namespace arsr

#endif
