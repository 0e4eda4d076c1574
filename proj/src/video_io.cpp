// Copyright 2026 The evmaf Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "evmaf/video_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evmaf/error.hpp"
#include "evmaf/log.hpp"

namespace evmaf {

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::kY:
      return "Y";
    case Channel::kCb:
      return "Cb";
    case Channel::kCr:
      return "Cr";
  }
  return "?";
}

void VideoSpec::validate() const {
  std::ostringstream why;
  if (width < 64 || height < 64 || width % 2 != 0 || height % 2 != 0) {
    why << "video geometry " << width << "x" << height
        << " must be even and at least 64x64";
  } else if (bit_depth != 8 && bit_depth != 10) {
    why << "bit depth " << bit_depth << " not in {8, 10}";
  } else if (frame_count < 2) {
    why << "frame_count " << frame_count << " must be at least 2";
  } else if (!(fps > 0.0)) {
    why << "fps must be positive";
  }
  if (!why.str().empty()) throw ConfigurationError(why.str());
}

std::uintmax_t VideoSpec::frame_bytes() const {
  const std::uintmax_t luma = static_cast<std::uintmax_t>(width) * height;
  const std::uintmax_t chroma =
      static_cast<std::uintmax_t>(chroma_width()) * chroma_height();
  return (luma + 2 * chroma) * bytes_per_sample();
}

ContainerFormat guess_format(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".y4m" ? ContainerFormat::kY4m : ContainerFormat::kRawYuv;
}

namespace {

struct Y4mHeader {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  std::string colorspace = "420";
};

Y4mHeader parse_y4m_header(const std::string& line,
                           const std::filesystem::path& path) {
  std::istringstream in(line);
  std::string magic;
  in >> magic;
  if (magic != "YUV4MPEG2") {
    throw MalformedInputError(path.string() + ": missing YUV4MPEG2 signature");
  }
  Y4mHeader h;
  std::string tok;
  while (in >> tok) {
    const char tag = tok[0];
    const std::string val = tok.substr(1);
    if (tag == 'W') {
      h.width = std::stoi(val);
    } else if (tag == 'H') {
      h.height = std::stoi(val);
    } else if (tag == 'C') {
      h.colorspace = val;
      if (val.find("p10") != std::string::npos) h.bit_depth = 10;
      if (val.rfind("420", 0) != 0) {
        throw MalformedInputError(path.string() +
                                  ": only 4:2:0 y4m is supported, got C" + val);
      }
    }
  }
  return h;
}

}  // namespace

SequenceReader SequenceReader::open(const std::filesystem::path& path,
                                    const VideoSpec& spec) {
  return open(path, spec, guess_format(path));
}

SequenceReader SequenceReader::open(const std::filesystem::path& path,
                                    const VideoSpec& spec,
                                    ContainerFormat format) {
  spec.validate();
  std::error_code ec;
  const auto actual = std::filesystem::file_size(path, ec);
  if (ec) throw IoError("cannot open " + path.string() + ": " + ec.message());

  SequenceReader r;
  r.path_ = path;
  r.spec_ = spec;
  r.stream_.open(path, std::ios::binary);
  if (!r.stream_) throw IoError("cannot open " + path.string());

  const auto frame_bytes = spec.frame_bytes();
  if (format == ContainerFormat::kRawYuv) {
    const auto expected = frame_bytes * spec.frame_count;
    if (actual != expected) {
      std::ostringstream why;
      why << path.string() << ": size mismatch, expected " << expected
          << " bytes for " << spec.frame_count << " frames of " << spec.width
          << "x" << spec.height << " @" << spec.bit_depth << "bit, actual "
          << actual << " bytes";
      throw MalformedInputError(why.str());
    }
    for (int i = 0; i < spec.frame_count; ++i) {
      r.frame_offsets_.push_back(frame_bytes * i);
    }
    return r;
  }

  std::string header;
  std::getline(r.stream_, header);
  const auto h = parse_y4m_header(header, path);
  if (h.width != spec.width || h.height != spec.height ||
      h.bit_depth != spec.bit_depth) {
    std::ostringstream why;
    why << path.string() << ": y4m header says " << h.width << "x" << h.height
        << " @" << h.bit_depth << "bit, manifest geometry " << spec.width
        << "x" << spec.height << " @" << spec.bit_depth << "bit wins";
    log_warning(why.str());
  }
  std::uintmax_t pos = static_cast<std::uintmax_t>(r.stream_.tellg());
  for (int i = 0; i < spec.frame_count; ++i) {
    std::string marker;
    r.stream_.seekg(static_cast<std::streamoff>(pos));
    if (!std::getline(r.stream_, marker) || marker.rfind("FRAME", 0) != 0) {
      std::ostringstream why;
      why << path.string() << ": expected FRAME marker for frame " << i
          << " at byte " << pos;
      throw MalformedInputError(why.str());
    }
    pos += marker.size() + 1;
    if (pos + frame_bytes > actual) {
      std::ostringstream why;
      why << path.string() << ": frame " << i << " truncated, expected "
          << pos + frame_bytes << " bytes, actual " << actual;
      throw MalformedInputError(why.str());
    }
    r.frame_offsets_.push_back(pos);
    pos += frame_bytes;
  }
  r.stream_.clear();
  return r;
}

Frame SequenceReader::read_frame(int index) {
  if (index < 0 || index >= spec_.frame_count) {
    std::ostringstream why;
    why << path_.string() << ": frame index " << index << " outside [0, "
        << spec_.frame_count << ")";
    throw OutOfRangeError(why.str());
  }
  const auto bytes = spec_.frame_bytes();
  std::vector<unsigned char> buf(static_cast<std::size_t>(bytes));
  stream_.clear();
  stream_.seekg(static_cast<std::streamoff>(frame_offsets_[index]));
  stream_.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(bytes));
  if (stream_.gcount() != static_cast<std::streamsize>(bytes)) {
    throw IoError(path_.string() + ": short read");
  }

  Frame f;
  const int bps = spec_.bytes_per_sample();
  const unsigned max_code = (1u << spec_.bit_depth) - 1u;
  std::size_t offset = 0;
  for (int c = 0; c < 3; ++c) {
    const int w = c == 0 ? spec_.width : spec_.chroma_width();
    const int h = c == 0 ? spec_.height : spec_.chroma_height();
    Plane p(w, h);
    for (auto& v : p.values()) {
      unsigned code = buf[offset];
      if (bps == 2) code |= static_cast<unsigned>(buf[offset + 1]) << 8;
      offset += static_cast<std::size_t>(bps);
      v = normalize_code(std::min(code, max_code), spec_.bit_depth);
    }
    f.planes[c] = std::move(p);
  }
  return f;
}

Plane full_geometry(const Plane& plane, int luma_width, int luma_height) {
  return upsample_nearest(plane, luma_width, luma_height);
}

FramePair make_frame_pair(Frame ref, Frame test, int index,
                          ResampleRule rule) {
  const Plane& ry = ref.plane(Channel::kY);
  const Plane& ty = test.plane(Channel::kY);
  if (!ry.same_geometry(ty)) {
    if (rule == ResampleRule::kNone) {
      std::ostringstream why;
      why << "test geometry " << ty.width() << "x" << ty.height()
          << " differs from reference " << ry.width() << "x" << ry.height()
          << " and no upsampling rule is declared";
      throw ConfigurationError(why.str());
    }
    for (int c = 0; c < 3; ++c) {
      const Plane& target = ref.planes[c];
      test.planes[c] =
          resize_bilinear(test.planes[c], target.width(), target.height());
    }
  }
  FramePair pair;
  pair.ref = std::move(ref.planes);
  pair.test = std::move(test.planes);
  pair.frame_index = index;
  return pair;
}

FramePair read_frame_pair(SequenceReader& ref, SequenceReader& test, int index,
                          ResampleRule rule) {
  const int limit = std::min(ref.frame_count(), test.frame_count());
  if (index < 0 || index >= limit) {
    std::ostringstream why;
    why << "frame pair index " << index << " outside [0, " << limit << ")";
    throw OutOfRangeError(why.str());
  }
  return make_frame_pair(ref.read_frame(index), test.read_frame(index), index,
                         rule);
}

namespace {

void append_plane(std::vector<unsigned char>& out, const Plane& p,
                  int bit_depth) {
  const double max_code = static_cast<double>((1 << bit_depth) - 1);
  for (double v : p.values()) {
    const auto code = static_cast<unsigned>(
        std::lround(std::clamp(v, 0.0, 1.0) * max_code));
    out.push_back(static_cast<unsigned char>(code & 0xff));
    if (bit_depth > 8) out.push_back(static_cast<unsigned char>(code >> 8));
  }
}

std::vector<unsigned char> encode_frame(const Frame& f, int bit_depth) {
  std::vector<unsigned char> out;
  for (const auto& p : f.planes) append_plane(out, p, bit_depth);
  return out;
}

void check_writable(const std::ofstream& out,
                    const std::filesystem::path& path) {
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

void write_raw_yuv(const std::filesystem::path& path,
                   const std::vector<Frame>& frames, int bit_depth) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  check_writable(out, path);
  for (const auto& f : frames) {
    const auto bytes = encode_frame(f, bit_depth);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  check_writable(out, path);
}

void write_y4m(const std::filesystem::path& path,
               const std::vector<Frame>& frames, int bit_depth, double fps) {
  if (frames.empty()) throw InputError("write_y4m: no frames");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  check_writable(out, path);
  const Plane& y = frames.front().plane(Channel::kY);
  const long fps_num = std::lround(fps * 1000.0);
  out << "YUV4MPEG2 W" << y.width() << " H" << y.height() << " F" << fps_num
      << ":1000 Ip A1:1 C" << (bit_depth > 8 ? "420p10" : "420jpeg") << "\n";
  for (const auto& f : frames) {
    out << "FRAME\n";
    const auto bytes = encode_frame(f, bit_depth);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  check_writable(out, path);
}

}  // namespace evmaf
