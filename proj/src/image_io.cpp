#include "teamtrack/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>

#include <nlohmann/json.hpp>

#include "teamtrack/util.hpp"

namespace teamtrack {

namespace {

// Reads one PNM token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) continue;
        break;
    }
    if (c == EOF) return tok;
    tok.push_back(static_cast<char>(c));
    while ((c = in.get()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(c));
    return tok;
}

int parse_int(const std::string& tok, const std::filesystem::path& path, const char* what) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::Io, "malformed PPM " + std::string(what) + " in " + path.string());
    }
}

}  // namespace

void save_ppm(const Frame& frame, const std::filesystem::path& path) {
    if (frame.width < 1 || frame.height < 1)
        throw Error(ErrorKind::InvalidArgument, "save_ppm: empty frame");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::Io, "save_ppm: cannot open " + path.string());
    out << "P6\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.data.data()),
              static_cast<std::streamsize>(frame.data.size()));
    if (!out)
        throw Error(ErrorKind::Io, "save_ppm: write failed for " + path.string());
}

Frame load_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "load_ppm: cannot open " + path.string());
    const std::string magic = next_token(in);
    if (magic != "P6")
        throw Error(ErrorKind::Io, "load_ppm: not a binary PPM (P6): " + path.string());
    const int w = parse_int(next_token(in), path, "width");
    const int h = parse_int(next_token(in), path, "height");
    const int maxval = parse_int(next_token(in), path, "maxval");
    if (w < 1 || h < 1 || maxval != 255)
        throw Error(ErrorKind::Io, "load_ppm: unsupported header in " + path.string());
    // header ends with exactly one whitespace byte before the payload
    Frame frame(w, h);
    in.read(reinterpret_cast<char*>(frame.data.data()),
            static_cast<std::streamsize>(frame.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(frame.data.size()))
        throw Error(ErrorKind::Io, "load_ppm: truncated payload in " + path.string());
    return frame;
}

std::string frame_file_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%06d.ppm", index);
    return buf;
}

FrameSequence load_frame_sequence(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw Error(ErrorKind::Io, "load_frame_sequence: no such directory: " + dir.string());

    std::set<int> indices;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        int idx = -1;
        if (std::sscanf(name.c_str(), "frame_%6d.ppm", &idx) == 1 &&
            name == frame_file_name(idx)) {
            indices.insert(idx);
        }
    }
    if (indices.empty())
        throw Error(ErrorKind::EmptySequence, "load_frame_sequence: no frame_%06d.ppm files in " + dir.string());
    const int count = static_cast<int>(indices.size());
    if (*indices.begin() != 0 || *indices.rbegin() != count - 1)
        throw Error(ErrorKind::NonContiguous, "load_frame_sequence: frame indices are not contiguous from 0 in " + dir.string());

    FrameSequence seq;
    seq.directory = dir;
    seq.frames.resize(count);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    parallel_for(count, [&](int i) {
        try {
            seq.frames[i] = load_ppm(dir / frame_file_name(i));
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
    for (int i = 1; i < count; ++i)
        if (seq.frames[i].width != seq.width() || seq.frames[i].height != seq.height())
            throw Error(ErrorKind::DimensionMismatch,
                        "load_frame_sequence: frame dimensions differ at index " + std::to_string(i));

    const auto meta_path = dir / "seq.json";
    if (fs::exists(meta_path)) {
        std::ifstream in(meta_path);
        nlohmann::json meta = nlohmann::json::parse(in, nullptr, true);
        if (meta.contains("fps")) seq.fps = meta["fps"].get<double>();
        if (meta.contains("frames") && meta["frames"].get<int>() != count)
            throw Error(ErrorKind::SchemaMismatch, "seq.json frame count does not match directory contents");
    }
    return seq;
}

}  // namespace teamtrack
