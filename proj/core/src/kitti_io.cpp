#include "mono3d/kitti_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mono3d {

ImageBuffer ImageBuffer::filled(int width, int height, std::uint8_t r, std::uint8_t g,
                                std::uint8_t b) {
  ImageBuffer img;
  img.width = width;
  img.height = height;
  img.pixels.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
    img.pixels[i] = r;
    img.pixels[i + 1] = g;
    img.pixels[i + 2] = b;
  }
  return img;
}

DepthRaster DepthRaster::constant(int width, int height, float value) {
  DepthRaster d;
  d.width = width;
  d.height = height;
  d.data.assign(static_cast<std::size_t>(width) * height, value);
  return d;
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_num(const std::string& tok, int line_number, int field_count) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw MalformedLabel("non-numeric field '" + tok + "'", line_number, field_count);
  }
  if (used != tok.size())
    throw MalformedLabel("non-numeric field '" + tok + "'", line_number, field_count);
  return v;
}

}  // namespace

LabelRecord parse_label_line(const std::string& line, int line_number) {
  const auto toks = split_ws(line);
  const int n = static_cast<int>(toks.size());
  if (n != 15 && n != 16)
    throw MalformedLabel("expected 15 or 16 fields, found " + std::to_string(n),
                         line_number, n);

  LabelRecord r;
  r.class_name = toks[0];
  double vals[15];
  for (int i = 1; i < n; ++i) vals[i - 1] = parse_num(toks[i], line_number, n);

  r.truncated = vals[0];
  r.occluded = static_cast<int>(vals[1]);
  r.alpha = vals[2];
  r.left = vals[3];
  r.top = vals[4];
  r.right = vals[5];
  r.bottom = vals[6];
  r.h = vals[7];
  r.w = vals[8];
  r.l = vals[9];
  r.location = Vec3(vals[10], vals[11], vals[12]);
  r.rotation_y = vals[13];
  if (n == 16) r.score = vals[14];

  if (!r.is_dont_care()) {
    if (!(r.right > r.left) || !(r.bottom > r.top))
      throw MalformedLabel("degenerate 2D box", line_number, n);
    if (!(r.h > 0 && r.w > 0 && r.l > 0))
      throw MalformedLabel("non-positive dimensions", line_number, n);
  }
  return r;
}

std::string serialize_label_line(const LabelRecord& rec) {
  char buf[512];
  int len = std::snprintf(
      buf, sizeof(buf),
      "%s %.2f %d %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f",
      rec.class_name.c_str(), rec.truncated, rec.occluded, rec.alpha, rec.left,
      rec.top, rec.right, rec.bottom, rec.h, rec.w, rec.l, rec.location.x(),
      rec.location.y(), rec.location.z(), rec.rotation_y);
  std::string out(buf, len);
  if (rec.score) {
    len = std::snprintf(buf, sizeof(buf), " %.2f", *rec.score);
    out.append(buf, len);
  }
  return out;
}

std::vector<LabelRecord> parse_label_file(const std::string& text) {
  std::vector<LabelRecord> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_label_line(line, lineno));
  }
  return out;
}

std::string serialize_label_file(const std::vector<LabelRecord>& recs) {
  std::string out;
  for (const auto& r : recs) {
    out += serialize_label_line(r);
    out += '\n';
  }
  return out;
}

CalibData parse_calib(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] != "P2:" && toks[0] != "P2") continue;
    if (toks.size() != 13) throw MalformedCalib("P2 line must carry 12 numerics");
    CalibData c;
    for (int i = 0; i < 12; ++i) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(toks[i + 1], &used);
      } catch (const std::exception&) {
        throw MalformedCalib("non-numeric P2 entry '" + toks[i + 1] + "'");
      }
      if (used != toks[i + 1].size())
        throw MalformedCalib("non-numeric P2 entry '" + toks[i + 1] + "'");
      c.p2(i / 4, i % 4) = v;
    }
    if (!(c.p2(0, 0) > 0) || !(c.p2(1, 1) > 0))
      throw MalformedCalib("P2 focal entries must be positive");
    // After normalization the 3x3 left block's bottom row must be [0,0,1].
    const double w = c.p2(2, 2);
    if (std::abs(w) < 1e-12 || std::abs(c.p2(2, 0) / w) > 1e-9 ||
        std::abs(c.p2(2, 1) / w) > 1e-9)
      throw MalformedCalib("P2 bottom row is not [0,0,1,*]");
    c.fx = c.p2(0, 0);
    c.fy = c.p2(1, 1);
    c.cx = c.p2(0, 2);
    c.cy = c.p2(1, 2);
    return c;
  }
  throw MissingKey("P2");
}

namespace {

// Reads one whitespace-delimited token from a byte buffer, PNM-style.
std::string next_token(const std::vector<std::uint8_t>& b, std::size_t& pos) {
  while (pos < b.size() && std::isspace(b[pos])) ++pos;
  std::size_t start = pos;
  while (pos < b.size() && !std::isspace(b[pos])) ++pos;
  if (start == pos) throw TruncatedFile("unexpected end of header");
  return std::string(b.begin() + start, b.begin() + pos);
}

int parse_dim(const std::string& tok) {
  try {
    std::size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw UnsupportedFormat("bad dimension '" + tok + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw UnsupportedFormat("bad dimension '" + tok + "'");
  }
}

bool host_is_little_endian() {
  const std::uint16_t x = 1;
  return *reinterpret_cast<const std::uint8_t*>(&x) == 1;
}

}  // namespace

DepthRaster read_pfm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  const std::string magic = next_token(bytes, pos);
  if (magic == "PF") throw UnsupportedFormat("color PFM is not supported");
  if (magic != "Pf") throw UnsupportedFormat("not a PFM file");
  const int width = parse_dim(next_token(bytes, pos));
  const int height = parse_dim(next_token(bytes, pos));
  const std::string scale_tok = next_token(bytes, pos);
  double scale = 0;
  try {
    scale = std::stod(scale_tok);
  } catch (const std::exception&) {
    throw UnsupportedFormat("bad scale '" + scale_tok + "'");
  }
  if (scale == 0) throw UnsupportedFormat("zero scale");
  // Exactly one whitespace byte separates header and payload.
  if (pos >= bytes.size() || !std::isspace(bytes[pos]))
    throw TruncatedFile("missing payload separator");
  ++pos;

  const bool file_little = scale < 0;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() - pos < count * 4) throw TruncatedFile("PFM payload short");

  DepthRaster out;
  out.width = width;
  out.height = height;
  out.data.resize(count);
  const bool swap = file_little != host_is_little_endian();
  // PFM stores rows bottom-to-top; flip to top-down in memory.
  for (int y = 0; y < height; ++y) {
    const int src_row = height - 1 - y;
    for (int x = 0; x < width; ++x) {
      std::uint8_t raw[4];
      std::memcpy(raw, bytes.data() + pos + 4 * (static_cast<std::size_t>(src_row) * width + x), 4);
      if (swap) std::swap(raw[0], raw[3]), std::swap(raw[1], raw[2]);
      float v;
      std::memcpy(&v, raw, 4);
      out.data[static_cast<std::size_t>(y) * width + x] = v;
    }
  }
  return out;
}

std::vector<std::uint8_t> write_pfm(const DepthRaster& raster) {
  char header[64];
  const double scale = host_is_little_endian() ? -1.0 : 1.0;
  int len = std::snprintf(header, sizeof(header), "Pf\n%d %d\n%.1f\n", raster.width,
                          raster.height, scale);
  std::vector<std::uint8_t> out(header, header + len);
  const std::size_t payload = out.size();
  out.resize(payload + raster.data.size() * 4);
  for (int y = 0; y < raster.height; ++y) {
    const int dst_row = raster.height - 1 - y;
    std::memcpy(out.data() + payload + 4 * static_cast<std::size_t>(dst_row) * raster.width,
                raster.data.data() + static_cast<std::size_t>(y) * raster.width,
                static_cast<std::size_t>(raster.width) * 4);
  }
  return out;
}

namespace {

// Shared P5/P6 reader.
void read_pnm_header(const std::vector<std::uint8_t>& bytes, const char* magic,
                     std::size_t& pos, int& width, int& height) {
  const std::string m = next_token(bytes, pos);
  if (m != magic) throw UnsupportedFormat(std::string("expected ") + magic + " magic");
  width = parse_dim(next_token(bytes, pos));
  height = parse_dim(next_token(bytes, pos));
  const std::string maxval = next_token(bytes, pos);
  if (maxval != "255") throw UnsupportedFormat("only maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos]))
    throw TruncatedFile("missing payload separator");
  ++pos;
}

}  // namespace

ImageBuffer read_ppm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  int width, height;
  read_pnm_header(bytes, "P6", pos, width, height);
  const std::size_t count = static_cast<std::size_t>(width) * height * 3;
  if (bytes.size() - pos < count) throw TruncatedFile("PPM payload short");
  ImageBuffer out;
  out.width = width;
  out.height = height;
  out.pixels.assign(bytes.begin() + pos, bytes.begin() + pos + count);
  return out;
}

std::vector<std::uint8_t> write_ppm(const ImageBuffer& image) {
  char header[64];
  int len = std::snprintf(header, sizeof(header), "P6\n%d %d\n255\n", image.width,
                          image.height);
  std::vector<std::uint8_t> out(header, header + len);
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

HoleMask read_pgm_mask(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  int width, height;
  read_pnm_header(bytes, "P5", pos, width, height);
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() - pos < count) throw TruncatedFile("PGM payload short");
  HoleMask out;
  out.width = width;
  out.height = height;
  out.bits.resize(count);
  for (std::size_t i = 0; i < count; ++i) out.bits[i] = bytes[pos + i] ? 1 : 0;
  return out;
}

std::vector<std::uint8_t> write_pgm_mask(const HoleMask& mask) {
  char header[64];
  int len = std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n", mask.width,
                          mask.height);
  std::vector<std::uint8_t> out(header, header + len);
  out.reserve(out.size() + mask.bits.size());
  for (auto b : mask.bits) out.push_back(b ? 255 : 0);
  return out;
}

PoseSpec parse_pose_spec(const std::string& text) {
  PoseSpec spec;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 2) throw MalformedPose("expected 'key value': " + line);
    std::string key = toks[0];
    if (!key.empty() && key.back() == ':') key.pop_back();
    double v = 0;
    std::size_t used = 0;
    try {
      v = std::stod(toks[1], &used);
    } catch (const std::exception&) {
      throw MalformedPose("non-numeric value '" + toks[1] + "' for key " + key);
    }
    if (used != toks[1].size() || !std::isfinite(v))
      throw MalformedPose("non-numeric value '" + toks[1] + "' for key " + key);
    if (key == "roll_deg") spec.roll_deg = v;
    else if (key == "pitch_deg") spec.pitch_deg = v;
    else if (key == "yaw_deg") spec.yaw_deg = v;
    else if (key == "tx") spec.tx = v;
    else if (key == "ty") spec.ty = v;
    else if (key == "tz") spec.tz = v;
    else throw UnknownKey("unknown pose key '" + key + "'");
  }
  return spec;
}

RigidPose pose_spec_to_rigid(const PoseSpec& spec) {
  const double d2r = M_PI / 180.0;
  return {compose_r3d(spec.roll_deg * d2r, spec.yaw_deg * d2r, spec.pitch_deg * d2r),
          Vec3(spec.tx, spec.ty, spec.tz)};
}

std::vector<RotationMatrix> parse_rotation_sidecar(const std::string& text) {
  std::vector<RotationMatrix> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 9)
      throw MalformedLabel("rotation sidecar line needs 9 numerics", lineno,
                           static_cast<int>(toks.size()));
    Mat3 m;
    for (int i = 0; i < 9; ++i) {
      try {
        m(i / 3, i % 3) = std::stod(toks[i]);
      } catch (const std::exception&) {
        throw MalformedLabel("non-numeric rotation entry", lineno, 9);
      }
    }
    out.push_back(RotationMatrix::from_matrix(m));
  }
  return out;
}

std::string serialize_rotation_sidecar(const std::vector<RotationMatrix>& rotations) {
  std::string out;
  char buf[64];
  for (const auto& r : rotations) {
    const Mat3& m = r.matrix();
    for (int i = 0; i < 9; ++i) {
      const int len = std::snprintf(buf, sizeof(buf), "%.17g", m(i / 3, i % 3));
      if (i) out += ' ';
      out.append(buf, len);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure("cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f),
                                   std::istreambuf_iterator<char>());
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoFailure("short write to " + path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure("cannot open " + path + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoFailure("short write to " + path);
}

}  // namespace mono3d
