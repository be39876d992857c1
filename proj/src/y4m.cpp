#include "arsr/y4m.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace arsr {

namespace {

void check_dims(const VideoHeader& h, const std::filesystem::path& path) {
    if (h.width < 2 || h.height < 2 || h.width % 2 != 0 || h.height % 2 != 0) {
        throw FormatError("y4m 4:2:0 streams need even dimensions, got " +
                          std::to_string(h.width) + "x" + std::to_string(h.height) + " (" +
                          path.string() + ")");
    }
    if (h.fps_num < 1 || h.fps_den < 1) {
        throw FormatError("y4m frame rate must be positive (" + path.string() + ")");
    }
}

std::uint8_t to_byte(float v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0f), 0L, 255L));
}

void read_plane(std::ifstream& in, Tensor& plane, const std::filesystem::path& path) {
    std::vector<char> buf(plane.size());
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
        throw FormatError("truncated y4m frame payload in " + path.string());
    }
    for (std::size_t i = 0; i < buf.size(); ++i) {
        plane.data[i] = static_cast<float>(static_cast<std::uint8_t>(buf[i])) / 255.0f;
    }
}

void write_plane(std::ofstream& out, const Tensor& plane) {
    std::vector<char> buf(plane.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        buf[i] = static_cast<char>(to_byte(plane.data[i]));
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

} // namespace

Y4mReader::Y4mReader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    std::string line;
    if (!std::getline(in_, line)) {
        throw FormatError("missing y4m stream header in " + path.string());
    }
    std::istringstream tokens(line);
    std::string magic;
    tokens >> magic;
    if (magic != "YUV4MPEG2") {
        throw FormatError(path.string() + " is not a y4m stream");
    }
    auto parse_int = [&](const std::string& val, const std::string& tok) {
        try {
            return std::stoi(val);
        } catch (const std::exception&) {
            throw FormatError("malformed header token '" + tok + "' in " + path.string());
        }
    };
    bool have_w = false, have_h = false;
    std::string tok;
    while (tokens >> tok) {
        if (tok.size() < 2) continue;
        const char key = tok[0];
        const std::string val = tok.substr(1);
        switch (key) {
            case 'W':
                header_.width = parse_int(val, tok);
                have_w = true;
                break;
            case 'H':
                header_.height = parse_int(val, tok);
                have_h = true;
                break;
            case 'F': {
                const auto colon = val.find(':');
                if (colon == std::string::npos) {
                    throw FormatError("malformed frame rate '" + tok + "' in " + path.string());
                }
                header_.fps_num = parse_int(val.substr(0, colon), tok);
                header_.fps_den = parse_int(val.substr(colon + 1), tok);
                break;
            }
            case 'C':
                if (val.rfind("420", 0) != 0) {
                    throw FormatError("unsupported chroma layout C" + val + " in " +
                                      path.string() + " (only 4:2:0)");
                }
                break;
            default:
                break;  // interlacing/aspect tokens are accepted and ignored
        }
    }
    if (!have_w || !have_h) {
        throw FormatError("y4m header missing W or H in " + path.string());
    }
    check_dims(header_, path_);
}

std::optional<Frame> Y4mReader::next() {
    std::string line;
    if (!std::getline(in_, line)) {
        return std::nullopt;  // clean end of stream
    }
    if (line.rfind("FRAME", 0) != 0) {
        throw FormatError("expected FRAME marker in " + path_.string());
    }
    Frame f = make_frame({header_.width, header_.height});
    read_plane(in_, f.y, path_);
    read_plane(in_, f.cb, path_);
    read_plane(in_, f.cr, path_);
    return f;
}

Y4mWriter::Y4mWriter(const std::filesystem::path& path, const VideoHeader& header)
    : out_(path, std::ios::binary), path_(path), header_(header) {
    if (!out_) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    check_dims(header_, path_);
    out_ << "YUV4MPEG2 W" << header_.width << " H" << header_.height << " F" << header_.fps_num
         << ":" << header_.fps_den << " Ip A1:1 C420\n";
}

void Y4mWriter::write(const Frame& frame) {
    validate_frame(frame);
    if (frame.y.width != header_.width || frame.y.height != header_.height) {
        throw ContractError("frame " + frame.y.shape_str() + " does not match stream header " +
                            std::to_string(header_.width) + "x" + std::to_string(header_.height));
    }
    out_ << "FRAME\n";
    write_plane(out_, frame.y);
    write_plane(out_, frame.cb);
    write_plane(out_, frame.cr);
    if (!out_) {
        throw IoError("write failed for " + path_.string());
    }
}

} // namespace arsr
