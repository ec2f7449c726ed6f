// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#include "chanclip/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "chanclip/error.hpp"

namespace chanclip {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

bool is_frame_file(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".ppm" || ext == ".pgm";
}

/// Cursor over a netpbm header: whitespace-separated tokens, `#` comments.
class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t next_number() {
    skip_space_and_comments();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1u << 24)) throw DecodeError("netpbm header value too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw DecodeError("malformed netpbm header");
    return value;
  }

  /// Consume the single whitespace byte that separates header and raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw DecodeError("missing whitespace before netpbm raster");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

std::uint8_t round_to_u8(double v) {
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

/// Source coordinate and blend weight for half-pixel-centred sampling.
struct Tap {
  std::size_t i0;
  std::size_t i1;
  double frac;
};

std::vector<Tap> make_taps(std::size_t src, std::size_t dst) {
  std::vector<Tap> taps(dst);
  const double scale = static_cast<double>(src) / static_cast<double>(dst);
  for (std::size_t i = 0; i < dst; ++i) {
    double s = (static_cast<double>(i) + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const auto i0 = static_cast<std::size_t>(std::floor(s));
    taps[i] = {i0, std::min(i0 + 1, src - 1), s - static_cast<double>(i0)};
  }
  return taps;
}

std::size_t scale_round(std::size_t other, std::size_t target, std::size_t shorter) {
  // round_half_up(other * target / shorter), minimum 1
  const std::size_t v = (2 * other * target + shorter) / (2 * shorter);
  return std::max<std::size_t>(v, 1);
}

}  // namespace

std::vector<ManifestRecord> parse_manifest(std::string_view text) {
  std::vector<ManifestRecord> records;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (records.empty() && line.starts_with("clip_id,")) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() || fields[1].empty()) {
      throw FormatError("manifest line " + std::to_string(line_no) +
                        ": expected clip_id,relative_dir[,label]");
    }
    ManifestRecord rec{std::string(fields[0]), fs::path(std::string(fields[1])), std::nullopt};
    if (fields.size() == 3 && !fields[2].empty()) {
      int label = 0;
      const auto f = fields[2];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), label);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw FormatError("manifest line " + std::to_string(line_no) + ": bad label");
      }
      rec.label = label;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ManifestRecord> read_manifest(const fs::path& manifest) {
  const auto bytes = read_file(manifest);
  return parse_manifest(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void write_manifest(const fs::path& manifest, std::span<const ManifestRecord> records) {
  std::ofstream out(manifest, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + manifest.string() + " for writing");
  for (const auto& r : records) {
    out << r.clip_id << ',' << r.relative_dir.generic_string() << ',';
    if (r.label) out << *r.label;
    out << '\n';
  }
  out.close();
  if (!out) throw IoError("failed to write " + manifest.string());
}

VideoSource open_frame_dir(const fs::path& dir, const std::optional<ManifestRecord>& record) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a readable directory: " + dir.string());

  VideoSource source;
  fs::directory_iterator it(dir, ec);
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  for (const auto& entry : it) {
    if (entry.is_regular_file() && is_frame_file(entry.path())) {
      source.frame_paths.push_back(entry.path());
    }
  }
  if (source.frame_paths.empty()) throw EmptySourceError("no frame files in " + dir.string());
  std::sort(source.frame_paths.begin(), source.frame_paths.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });

  if (record) {
    source.id = record->clip_id;
    source.label = record->label;
  } else {
    source.id = fs::absolute(dir).lexically_normal().filename().string();
    if (source.id.empty()) source.id = fs::absolute(dir).parent_path().filename().string();
  }
  return source;
}

std::vector<VideoSource> open_manifest(const fs::path& manifest) {
  const auto base = manifest.parent_path();
  std::vector<VideoSource> sources;
  for (const auto& rec : read_manifest(manifest)) {
    sources.push_back(open_frame_dir(base / rec.relative_dir, rec));
  }
  return sources;
}

Frame decode_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw DecodeError("not a binary PPM/PGM (expected P5 or P6)");
  }
  const std::size_t channels = bytes[1] == '6' ? 3 : 1;
  HeaderReader header(bytes);
  const auto width = header.next_number();
  const auto height = header.next_number();
  const auto maxval = header.next_number();
  if (maxval != 255) throw DecodeError("unsupported maxval " + std::to_string(maxval));
  if (width == 0 || height == 0) throw DecodeError("zero-sized image");
  const auto offset = header.raster_offset();
  const std::size_t need = width * height * channels;
  if (bytes.size() < offset + need) throw DecodeError("short PPM/PGM payload");
  std::vector<std::uint8_t> data(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                 bytes.begin() + static_cast<std::ptrdiff_t>(offset + need));
  return Frame(height, width, channels, std::move(data));
}

std::vector<std::uint8_t> encode_ppm(const Frame& frame) {
  const std::string header = std::string(frame.channels() == 3 ? "P6" : "P5") + "\n" +
                             std::to_string(frame.width()) + " " +
                             std::to_string(frame.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), frame.data().begin(), frame.data().end());
  return out;
}

Frame load_frame(const fs::path& path) { return decode_ppm(read_file(path)); }

void save_frame(const Frame& frame, const fs::path& path) {
  const auto bytes = encode_ppm(frame);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError("failed to write " + path.string());
}

Frame to_grayscale(const Frame& frame) {
  if (frame.channels() != 3) throw ShapeError("grayscale conversion needs a 3-channel frame");
  Frame gray(frame.height(), frame.width(), 1);
  const auto src = frame.data();
  auto dst = gray.data();
  for (std::size_t p = 0; p < dst.size(); ++p) {
    const std::uint32_t y = 299u * src[3 * p] + 587u * src[3 * p + 1] + 114u * src[3 * p + 2];
    dst[p] = static_cast<std::uint8_t>((y + 500u) / 1000u);
  }
  return gray;
}

Frame resize(const Frame& frame, std::size_t out_height, std::size_t out_width) {
  if (frame.pixel_count() == 0) throw ShapeError("cannot resize an empty frame");
  if (out_height == 0 || out_width == 0) throw ArgumentError("resize target must be >= 1");
  if (out_height == frame.height() && out_width == frame.width()) return frame;

  const auto ys = make_taps(frame.height(), out_height);
  const auto xs = make_taps(frame.width(), out_width);
  const std::size_t ch = frame.channels();
  Frame out(out_height, out_width, ch);
  for (std::size_t y = 0; y < out_height; ++y) {
    const auto& ty = ys[y];
    for (std::size_t x = 0; x < out_width; ++x) {
      const auto& tx = xs[x];
      for (std::size_t c = 0; c < ch; ++c) {
        const double top = (1.0 - tx.frac) * frame.at(ty.i0, tx.i0, c) + tx.frac * frame.at(ty.i0, tx.i1, c);
        const double bot = (1.0 - tx.frac) * frame.at(ty.i1, tx.i0, c) + tx.frac * frame.at(ty.i1, tx.i1, c);
        out.at(y, x, c) = round_to_u8((1.0 - ty.frac) * top + ty.frac * bot);
      }
    }
  }
  return out;
}

Frame resize_shorter_side(const Frame& frame, std::size_t target) {
  if (target == 0) throw ArgumentError("resize target must be >= 1");
  const auto h = frame.height();
  const auto w = frame.width();
  if (h == 0 || w == 0) throw ShapeError("cannot resize an empty frame");
  if (h <= w) return resize(frame, target, scale_round(w, target, h));
  return resize(frame, scale_round(h, target, w), target);
}

Frame crop(const Frame& frame, std::size_t top, std::size_t left, std::size_t size) {
  if (top + size > frame.height() || left + size > frame.width()) {
    throw BoundsError("crop window (" + std::to_string(top) + "," + std::to_string(left) + ")+" +
                      std::to_string(size) + " exceeds " + std::to_string(frame.height()) + "x" +
                      std::to_string(frame.width()));
  }
  const std::size_t ch = frame.channels();
  Frame out(size, size, ch);
  const auto src = frame.data();
  auto dst = out.data();
  const std::size_t row = size * ch;
  for (std::size_t y = 0; y < size; ++y) {
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(((top + y) * frame.width() + left) * ch),
                row, dst.begin() + static_cast<std::ptrdiff_t>(y * row));
  }
  return out;
}

Frame hflip(const Frame& frame) {
  Frame out(frame.height(), frame.width(), frame.channels());
  const std::size_t w = frame.width();
  for (std::size_t y = 0; y < frame.height(); ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < frame.channels(); ++c) out.at(y, x, c) = frame.at(y, w - 1 - x, c);
    }
  }
  return out;
}

std::vector<Frame> five_crops_with_flips(const Frame& frame, std::size_t size) {
  const auto h = frame.height();
  const auto w = frame.width();
  if (size == 0 || size > std::min(h, w)) {
    throw BoundsError("five-crop size " + std::to_string(size) + " exceeds frame");
  }
  std::vector<Frame> out;
  out.reserve(10);
  out.push_back(crop(frame, 0, 0, size));
  out.push_back(crop(frame, 0, w - size, size));
  out.push_back(crop(frame, h - size, 0, size));
  out.push_back(crop(frame, h - size, w - size, size));
  out.push_back(crop(frame, (h - size) / 2, (w - size) / 2, size));
  for (std::size_t i = 0; i < 5; ++i) out.push_back(hflip(out[i]));
  return out;
}

std::vector<Frame> three_crops(const Frame& frame, std::size_t size) {
  const auto h = frame.height();
  const auto w = frame.width();
  if (size == 0 || size > std::min(h, w)) {
    throw BoundsError("three-crop size " + std::to_string(size) + " exceeds frame");
  }
  const std::size_t cy = (h - size) / 2;
  const std::size_t cx = (w - size) / 2;
  if (w >= h) {
    return {crop(frame, cy, 0, size), crop(frame, cy, cx, size), crop(frame, cy, w - size, size)};
  }
  return {crop(frame, 0, cx, size), crop(frame, cy, cx, size), crop(frame, h - size, cx, size)};
}

void SpatialSpec::validate() const {
  if (resize_shorter_min == 0 || crop_size == 0) {
    throw ArgumentError("resize and crop sizes must be >= 1");
  }
  if (resize_shorter_min > resize_shorter_max) {
    throw ArgumentError("resize_shorter_min > resize_shorter_max");
  }
  if (crop_size > resize_shorter_min) throw ArgumentError("crop_size > resize_shorter_min");
}

CropWindow draw_crop_window(std::size_t height, std::size_t width, const SpatialSpec& spec,
                            Rng& rng) {
  spec.validate();
  CropWindow win;
  win.resize_target = spec.mode == CropMode::kRandomCrop
                          ? static_cast<std::size_t>(
                                rng.uniform(spec.resize_shorter_min, spec.resize_shorter_max))
                          : spec.resize_shorter_min;
  std::size_t rh = win.resize_target;
  std::size_t rw = win.resize_target;
  if (height <= width) {
    rw = scale_round(width, win.resize_target, height);
  } else {
    rh = scale_round(height, win.resize_target, width);
  }
  if (spec.mode == CropMode::kRandomCrop) {
    win.top = static_cast<std::size_t>(rng.uniform(0, rh - spec.crop_size));
    win.left = static_cast<std::size_t>(rng.uniform(0, rw - spec.crop_size));
  } else {
    win.top = (rh - spec.crop_size) / 2;
    win.left = (rw - spec.crop_size) / 2;
  }
  return win;
}

std::vector<Frame> spatial_pipeline(std::span<const Frame> frames, const SpatialSpec& spec,
                                    Rng& rng) {
  if (frames.empty()) return {};
  for (const auto& f : frames) {
    if (!f.same_shape(frames.front())) throw ShapeError("clip frames differ in shape");
  }
  const auto win = draw_crop_window(frames.front().height(), frames.front().width(), spec, rng);

  if (spec.mode == CropMode::kFiveCropFlip) {
    std::vector<Frame> out(frames.size() * 10);
    for (std::size_t i = 0; i < frames.size(); ++i) {
      auto views = five_crops_with_flips(resize_shorter_side(frames[i], win.resize_target),
                                         spec.crop_size);
      for (std::size_t v = 0; v < views.size(); ++v) out[v * frames.size() + i] = std::move(views[v]);
    }
    return out;
  }

  std::vector<Frame> out;
  out.reserve(frames.size());
  for (const auto& f : frames) {
    out.push_back(crop(resize_shorter_side(f, win.resize_target), win.top, win.left, spec.crop_size));
  }
  return out;
}

}  // namespace chanclip
