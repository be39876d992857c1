#ifndef ARSR_WEIGHTS_IO_HPP
#define ARSR_WEIGHTS_IO_HPP

#include <filesystem>
#include <vector>

#include "arsr/model.hpp"
#include "arsr/quant.hpp"

namespace arsr {

// On-disk model: a text manifest (version, config, form, per-conv shapes
// and byte offsets, quantization grids when present) followed by one
// little-endian float32 blob with each conv's kernels then bias, in
// network order. Serialization is canonical: write -> read -> write is
// byte-identical.
struct ModelFile {
    ModelConfig cfg;
    WeightSet weights;
    bool quantized = false;
    int bits = 0;
    bool pow2 = false;
    std::vector<QuantParams> weight_q;  // per conv, only when quantized
    std::vector<QuantParams> act_q;     // per logical layer, only when quantized

    QuantizedModel to_quantized() const;  // throws ContractError when not quantized
};

ModelFile load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const ModelFile& file);

void save_model(const std::filesystem::path& path, const ModelConfig& cfg, const WeightSet& w);
void save_model(const std::filesystem::path& path, const QuantizedModel& qm);

} // namespace arsr

#endif
