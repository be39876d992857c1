#ifndef ARSR_Y4M_HPP
#define ARSR_Y4M_HPP

#include <filesystem>
#include <fstream>
#include <optional>

#include "arsr/pipeline.hpp"

namespace arsr {

// Stream parameters of a YUV4MPEG2 (y4m) file. Only 4:2:0 chroma is
// supported, which requires even frame dimensions.
struct VideoHeader {
    int width = 0;
    int height = 0;
    int fps_num = 30;
    int fps_den = 1;
};

class Y4mReader {
public:
    explicit Y4mReader(const std::filesystem::path& path);
    const VideoHeader& header() const { return header_; }
    // Next frame, or nullopt at end of stream. Truncated payloads throw.
    std::optional<Frame> next();

private:
    std::ifstream in_;
    std::filesystem::path path_;
    VideoHeader header_;
};

class Y4mWriter {
public:
    Y4mWriter(const std::filesystem::path& path, const VideoHeader& header);
    void write(const Frame& frame);

private:
    std::ofstream out_;
    std::filesystem::path path_;
    VideoHeader header_;
};

} // namespace arsr

#endif
