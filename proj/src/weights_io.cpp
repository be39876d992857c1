#include "arsr/weights_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace arsr {

namespace {

constexpr int kFormatVersion = 1;

std::string float_str(float v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void append_le32(std::vector<std::uint8_t>& out, float v) {
    const std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
    out.push_back(static_cast<std::uint8_t>(bits & 0xFF));
    out.push_back(static_cast<std::uint8_t>((bits >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((bits >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((bits >> 24) & 0xFF));
}

float read_le32(const std::uint8_t* p) {
    const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                               (static_cast<std::uint32_t>(p[1]) << 8) |
                               (static_cast<std::uint32_t>(p[2]) << 16) |
                               (static_cast<std::uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(bits);
}

std::string kernels_str(const std::vector<int>& ks) {
    std::string out;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(ks[i]);
    }
    return out;
}

std::vector<int> parse_kernels(const std::string& s) {
    std::vector<int> out;
    std::istringstream stream(s);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw FormatError("manifest kernel list entry '" + item + "' is not an integer");
        }
    }
    return out;
}

// Simple line tokenizer for the manifest: key followed by fields.
struct ManifestLine {
    std::string key;
    std::vector<std::string> fields;
};

class ManifestParser {
public:
    ManifestParser(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {}

    ManifestLine next() {
        std::string line;
        if (!std::getline(in_, line)) {
            throw FormatError("unexpected end of manifest in " + path_);
        }
        std::istringstream tokens(line);
        ManifestLine out;
        tokens >> out.key;
        std::string tok;
        while (tokens >> tok) out.fields.push_back(tok);
        if (out.key.empty()) {
            throw FormatError("blank manifest line in " + path_);
        }
        return out;
    }

    int int_field(const ManifestLine& l, std::size_t i) const {
        if (i >= l.fields.size()) {
            throw FormatError("manifest line '" + l.key + "' is missing fields in " + path_);
        }
        try {
            return std::stoi(l.fields[i]);
        } catch (const std::exception&) {
            throw FormatError("manifest field '" + l.fields[i] + "' is not an integer in " +
                              path_);
        }
    }

    float float_field(const ManifestLine& l, std::size_t i) const {
        if (i >= l.fields.size()) {
            throw FormatError("manifest line '" + l.key + "' is missing fields in " + path_);
        }
        char* end = nullptr;
        const float v = std::strtof(l.fields[i].c_str(), &end);
        if (end == l.fields[i].c_str() || *end != '\0') {
            throw FormatError("manifest field '" + l.fields[i] + "' is not a number in " + path_);
        }
        return v;
    }

    ManifestLine expect(const std::string& key) {
        ManifestLine l = next();
        if (l.key != key) {
            throw FormatError("manifest expected '" + key + "' but found '" + l.key + "' in " +
                              path_);
        }
        return l;
    }

private:
    std::istream& in_;
    std::string path_;
};

// Labeled key-value pairs within one line, e.g.
//   conv 0 in 1 out 16 kernel 7 groups 1 offset 0 kernels 784 bias 16
std::map<std::string, std::string> labeled_fields(const ManifestLine& l, std::size_t from) {
    std::map<std::string, std::string> out;
    for (std::size_t i = from; i + 1 < l.fields.size(); i += 2) {
        out[l.fields[i]] = l.fields[i + 1];
    }
    return out;
}

int labeled_int(const std::map<std::string, std::string>& m, const std::string& key,
                const std::string& path) {
    auto it = m.find(key);
    if (it == m.end()) {
        throw FormatError("manifest conv line missing '" + key + "' in " + path);
    }
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        throw FormatError("manifest field '" + key + "=" + it->second +
                          "' is not an integer in " + path);
    }
}

QuantParams parse_quant_line(const ManifestLine& l, const std::string& path) {
    const auto fields = labeled_fields(l, 1);
    QuantParams q;
    q.bits = labeled_int(fields, "bits", path);
    auto it = fields.find("scale");
    if (it == fields.end()) {
        throw FormatError("manifest quant line missing 'scale' in " + path);
    }
    char* end = nullptr;
    q.scale = std::strtof(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0' || !(q.scale > 0.0f)) {
        throw FormatError("manifest quant scale '" + it->second + "' is invalid in " + path);
    }
    q.pow2 = labeled_int(fields, "pow2", path) != 0;
    return q;
}

void write_quant_line(std::ostream& out, const char* key, int index, const QuantParams& q) {
    out << key << " " << index << " bits " << q.bits << " scale " << float_str(q.scale)
        << " pow2 " << (q.pow2 ? 1 : 0) << "\n";
}

} // namespace

QuantizedModel ModelFile::to_quantized() const {
    if (!quantized) {
        throw ContractError("model file holds no quantization parameters");
    }
    QuantizedModel qm;
    qm.cfg = cfg;
    qm.weights = weights;
    qm.weight_q = weight_q;
    qm.act_q = act_q;
    qm.bits = bits;
    qm.pow2 = pow2;
    return qm;
}

void save_model(const std::filesystem::path& path, const ModelFile& file) {
    file.cfg.validate();
    check_weights(file.cfg, file.weights);
    if (file.quantized) {
        if (file.weights.form != WeightForm::kCollapsed) {
            throw ContractError("quantized model files must hold collapsed weights");
        }
        if (file.weight_q.size() != file.weights.layers.size() ||
            file.act_q.size() != static_cast<std::size_t>(file.cfg.logical_layers())) {
            throw ContractError("quantization parameter counts do not match the topology");
        }
    }

    std::ostringstream manifest;
    manifest << "arsr-weights " << kFormatVersion << "\n";
    manifest << "form "
             << (file.weights.form == WeightForm::kCollapsed ? "collapsed" : "expanded") << "\n";
    manifest << "n_feat " << file.cfg.n_feat << "\n";
    manifest << "n_map " << file.cfg.n_map << "\n";
    manifest << "base_channels " << file.cfg.base_channels << "\n";
    manifest << "expansion " << file.cfg.expansion << "\n";
    manifest << "feat_kernels " << kernels_str(file.cfg.feat_kernels) << "\n";
    manifest << "map_kernel " << file.cfg.map_kernel << "\n";
    manifest << "groups " << file.cfg.groups << "\n";
    manifest << "scale " << file.cfg.scale << "\n";
    manifest << "final_kernel " << file.cfg.final_kernel << "\n";
    manifest << "quantized " << (file.quantized ? 1 : 0) << "\n";
    if (file.quantized) {
        manifest << "bits " << file.bits << "\n";
        manifest << "pow2 " << (file.pow2 ? 1 : 0) << "\n";
    }
    manifest << "conv_count " << file.weights.layers.size() << "\n";

    std::vector<std::uint8_t> blob;
    std::size_t offset = 0;
    for (std::size_t i = 0; i < file.weights.layers.size(); ++i) {
        const ConvWeights& c = file.weights.layers[i];
        manifest << "conv " << i << " in " << c.in_channels() << " out " << c.out_channels
                 << " kernel " << c.kernel << " groups " << c.groups << " offset " << offset
                 << " kernels " << c.kernels.size() << " bias " << c.bias.size() << "\n";
        for (float v : c.kernels) append_le32(blob, v);
        for (float v : c.bias) append_le32(blob, v);
        offset = blob.size();
    }
    if (file.quantized) {
        for (std::size_t i = 0; i < file.weight_q.size(); ++i) {
            write_quant_line(manifest, "wq", static_cast<int>(i), file.weight_q[i]);
        }
        for (std::size_t i = 0; i < file.act_q.size(); ++i) {
            write_quant_line(manifest, "aq", static_cast<int>(i), file.act_q[i]);
        }
    }
    manifest << "blob " << blob.size() << "\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    const std::string head = manifest.str();
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    out.write(reinterpret_cast<const char*>(blob.data()),
              static_cast<std::streamsize>(blob.size()));
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

void save_model(const std::filesystem::path& path, const ModelConfig& cfg, const WeightSet& w) {
    ModelFile file;
    file.cfg = cfg;
    file.weights = w;
    save_model(path, file);
}

void save_model(const std::filesystem::path& path, const QuantizedModel& qm) {
    ModelFile file;
    file.cfg = qm.cfg;
    file.weights = qm.weights;
    file.quantized = true;
    file.bits = qm.bits;
    file.pow2 = qm.pow2;
    file.weight_q = qm.weight_q;
    file.act_q = qm.act_q;
    save_model(path, file);
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    ManifestParser parser(in, path.string());

    const ManifestLine magic = parser.next();
    if (magic.key != "arsr-weights") {
        throw FormatError(path.string() + " is not a weight file");
    }
    if (parser.int_field(magic, 0) != kFormatVersion) {
        throw FormatError(path.string() + " has unsupported format version " + magic.fields[0]);
    }

    ModelFile file;
    const ManifestLine form = parser.expect("form");
    if (form.fields.empty() ||
        (form.fields[0] != "collapsed" && form.fields[0] != "expanded")) {
        throw FormatError("manifest form must be collapsed or expanded in " + path.string());
    }
    file.weights.form =
        form.fields[0] == "collapsed" ? WeightForm::kCollapsed : WeightForm::kExpanded;

    file.cfg.n_feat = parser.int_field(parser.expect("n_feat"), 0);
    file.cfg.n_map = parser.int_field(parser.expect("n_map"), 0);
    file.cfg.base_channels = parser.int_field(parser.expect("base_channels"), 0);
    file.cfg.expansion = parser.int_field(parser.expect("expansion"), 0);
    const ManifestLine fk = parser.expect("feat_kernels");
    if (fk.fields.empty()) {
        throw FormatError("manifest feat_kernels line has no entries in " + path.string());
    }
    file.cfg.feat_kernels = parse_kernels(fk.fields[0]);
    file.cfg.map_kernel = parser.int_field(parser.expect("map_kernel"), 0);
    file.cfg.groups = parser.int_field(parser.expect("groups"), 0);
    file.cfg.scale = parser.int_field(parser.expect("scale"), 0);
    file.cfg.final_kernel = parser.int_field(parser.expect("final_kernel"), 0);
    try {
        file.cfg.validate();
    } catch (const ContractError& e) {
        throw FormatError("manifest config is invalid in " + path.string() + ": " + e.what());
    }

    file.quantized = parser.int_field(parser.expect("quantized"), 0) != 0;
    if (file.quantized) {
        file.bits = parser.int_field(parser.expect("bits"), 0);
        file.pow2 = parser.int_field(parser.expect("pow2"), 0) != 0;
        if (file.weights.form != WeightForm::kCollapsed) {
            throw FormatError("quantized manifest must hold collapsed weights in " +
                              path.string());
        }
    }

    const int conv_count = parser.int_field(parser.expect("conv_count"), 0);
    // Allocate the topology first, then verify each conv line against it.
    WeightSet expected = zero_weights(file.cfg, file.weights.form);
    if (conv_count != static_cast<int>(expected.layers.size())) {
        throw FormatError("manifest conv_count " + std::to_string(conv_count) +
                          " does not match the config topology (" +
                          std::to_string(expected.layers.size()) + ") in " + path.string());
    }
    file.weights.layers = std::move(expected.layers);

    std::vector<std::size_t> offsets(conv_count, 0);
    std::size_t expected_offset = 0;
    for (int i = 0; i < conv_count; ++i) {
        const ManifestLine l = parser.expect("conv");
        if (parser.int_field(l, 0) != i) {
            throw FormatError("manifest conv lines out of order in " + path.string());
        }
        const auto fields = labeled_fields(l, 1);
        const ConvWeights& c = file.weights.layers[i];
        const std::string p = path.string();
        if (labeled_int(fields, "in", p) != c.in_channels() ||
            labeled_int(fields, "out", p) != c.out_channels ||
            labeled_int(fields, "kernel", p) != c.kernel ||
            labeled_int(fields, "groups", p) != c.groups ||
            labeled_int(fields, "kernels", p) != static_cast<int>(c.kernels.size()) ||
            labeled_int(fields, "bias", p) != static_cast<int>(c.bias.size())) {
            throw FormatError("manifest conv " + std::to_string(i) +
                              " does not match the config topology in " + p);
        }
        offsets[i] = static_cast<std::size_t>(labeled_int(fields, "offset", p));
        if (offsets[i] != expected_offset) {
            throw FormatError("manifest conv " + std::to_string(i) + " offset " +
                              std::to_string(offsets[i]) + " is not contiguous in " + p);
        }
        expected_offset += (c.kernels.size() + c.bias.size()) * 4;
    }

    if (file.quantized) {
        for (int i = 0; i < conv_count; ++i) {
            const ManifestLine l = parser.expect("wq");
            if (parser.int_field(l, 0) != i) {
                throw FormatError("manifest wq lines out of order in " + path.string());
            }
            file.weight_q.push_back(parse_quant_line(l, path.string()));
        }
        for (int i = 0; i < file.cfg.logical_layers(); ++i) {
            const ManifestLine l = parser.expect("aq");
            if (parser.int_field(l, 0) != i) {
                throw FormatError("manifest aq lines out of order in " + path.string());
            }
            file.act_q.push_back(parse_quant_line(l, path.string()));
        }
    }

    const std::size_t blob_size =
        static_cast<std::size_t>(parser.int_field(parser.expect("blob"), 0));
    if (blob_size != expected_offset) {
        throw FormatError("manifest blob size " + std::to_string(blob_size) +
                          " does not match the declared convs in " + path.string());
    }
    std::vector<std::uint8_t> blob(blob_size);
    in.read(reinterpret_cast<char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
    if (in.gcount() != static_cast<std::streamsize>(blob.size())) {
        throw FormatError("truncated weight blob in " + path.string());
    }

    for (int i = 0; i < conv_count; ++i) {
        ConvWeights& c = file.weights.layers[i];
        const std::uint8_t* p = blob.data() + offsets[i];
        for (float& v : c.kernels) {
            v = read_le32(p);
            p += 4;
        }
        for (float& v : c.bias) {
            v = read_le32(p);
            p += 4;
        }
    }
    return file;
}

} // namespace arsr
