#include "dsfa/raster.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace dsfa {
namespace {

namespace fs = std::filesystem;

struct RasterPaths {
  fs::path header;
  fs::path payload;
};

RasterPaths resolve(const fs::path& path) {
  fs::path base = path;
  const auto ext = base.extension();
  if (ext == ".json" || ext == ".bin") base.replace_extension();
  RasterPaths p;
  p.header = base;
  p.header += ".json";
  p.payload = base;
  p.payload += ".bin";
  return p;
}

void check_image(const MultibandImage& img, const char* what) {
  if (img.rows <= 0 || img.cols <= 0 || img.bands <= 0)
    throw std::invalid_argument(std::string(what) + ": dimensions must be positive");
  const std::size_t expected =
      static_cast<std::size_t>(img.rows) * img.cols * img.bands;
  if (img.values.size() != expected)
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expected) +
                                " values, got " + std::to_string(img.values.size()));
  for (std::size_t i = 0; i < img.values.size(); ++i)
    if (!std::isfinite(img.values[i]))
      throw std::invalid_argument(std::string(what) + ": non-finite value at index " +
                                  std::to_string(i));
}

std::vector<std::uint8_t> read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

float decode_f32le(const std::uint8_t* b) {
  const std::uint32_t u = static_cast<std::uint32_t>(b[0]) |
                          static_cast<std::uint32_t>(b[1]) << 8 |
                          static_cast<std::uint32_t>(b[2]) << 16 |
                          static_cast<std::uint32_t>(b[3]) << 24;
  float f;
  std::memcpy(&f, &u, sizeof f);
  return f;
}

void encode_f32le(float f, std::uint8_t* b) {
  std::uint32_t u;
  std::memcpy(&u, &f, sizeof u);
  b[0] = static_cast<std::uint8_t>(u);
  b[1] = static_cast<std::uint8_t>(u >> 8);
  b[2] = static_cast<std::uint8_t>(u >> 16);
  b[3] = static_cast<std::uint8_t>(u >> 24);
}

}  // namespace

MultibandImage load_image(const fs::path& path) {
  const RasterPaths p = resolve(path);
  if (!fs::exists(p.header)) throw std::runtime_error("missing header file " + p.header.string());
  if (!fs::exists(p.payload))
    throw std::runtime_error("missing payload file " + p.payload.string());

  nlohmann::json hdr;
  {
    std::ifstream in(p.header);
    if (!in) throw std::runtime_error("cannot open " + p.header.string());
    in >> hdr;
  }
  MultibandImage img;
  try {
    img.rows = hdr.at("rows").get<int>();
    img.cols = hdr.at("cols").get<int>();
    img.bands = hdr.at("bands").get<int>();
    if (hdr.at("dtype").get<std::string>() != "f32")
      throw std::runtime_error("unsupported dtype, expected f32");
    if (hdr.at("layout").get<std::string>() != "bsq")
      throw std::runtime_error("unsupported layout, expected bsq");
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed header " + p.header.string() + ": " + e.what());
  }
  if (img.rows <= 0 || img.cols <= 0 || img.bands <= 0)
    throw std::runtime_error("header dimensions must be positive in " + p.header.string());

  const std::vector<std::uint8_t> bytes = read_all(p.payload);
  const std::size_t count = static_cast<std::size_t>(img.rows) * img.cols * img.bands;
  if (bytes.size() != count * 4)
    throw std::runtime_error("payload size mismatch in " + p.payload.string() + ": header implies " +
                             std::to_string(count * 4) + " bytes, file has " +
                             std::to_string(bytes.size()));

  img.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const float f = decode_f32le(bytes.data() + 4 * i);
    if (!std::isfinite(f))
      throw std::runtime_error("non-finite value at index " + std::to_string(i) + " in " +
                               p.payload.string());
    img.values[i] = static_cast<double>(f);
  }
  return img;
}

void save_image(const MultibandImage& image, const fs::path& path) {
  check_image(image, "save_image");
  const RasterPaths p = resolve(path);
  if (p.header.has_parent_path()) fs::create_directories(p.header.parent_path());

  nlohmann::ordered_json hdr;
  hdr["rows"] = image.rows;
  hdr["cols"] = image.cols;
  hdr["bands"] = image.bands;
  hdr["dtype"] = "f32";
  hdr["layout"] = "bsq";
  {
    std::ofstream out(p.header);
    if (!out) throw std::runtime_error("cannot write " + p.header.string());
    out << hdr.dump(2) << '\n';
  }

  std::vector<std::uint8_t> bytes(image.values.size() * 4);
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    const float f = static_cast<float>(image.values[i]);
    if (!std::isfinite(f))
      throw std::invalid_argument("save_image: value at index " + std::to_string(i) +
                                  " is not representable as float32");
    encode_f32le(f, bytes.data() + 4 * i);
  }
  std::ofstream out(p.payload, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.payload.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + p.payload.string());
}

void save_gray_map(const Vector& values, int rows, int cols, const fs::path& path) {
  if (rows <= 0 || cols <= 0 || values.size() != static_cast<Index>(rows) * cols)
    throw std::invalid_argument("save_gray_map: values length must equal rows*cols");
  for (Index i = 0; i < values.size(); ++i)
    if (!std::isfinite(values(i)))
      throw std::invalid_argument("save_gray_map: non-finite value at index " + std::to_string(i));

  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  std::vector<std::uint8_t> px(static_cast<std::size_t>(values.size()), 0);
  if (hi > lo) {
    for (Index i = 0; i < values.size(); ++i)
      px[static_cast<std::size_t>(i)] =
          static_cast<std::uint8_t>(std::floor((values(i) - lo) / (hi - lo) * 255.0 + 0.5));
  }

  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P5\n" << cols << ' ' << rows << "\n255\n";
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

Matrix flatten(const MultibandImage& image) {
  check_image(image, "flatten");
  // BSQ is band-major, so the payload is already a bands x pixels row-major matrix.
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajor>(image.values.data(), image.bands, image.pixel_count());
}

MultibandImage unflatten(const Matrix& pixels, int rows, int cols) {
  if (rows <= 0 || cols <= 0 || pixels.cols() != static_cast<Index>(rows) * cols)
    throw std::invalid_argument("unflatten: pixel count must equal rows*cols");
  MultibandImage img;
  img.rows = rows;
  img.cols = cols;
  img.bands = static_cast<int>(pixels.rows());
  img.values.resize(static_cast<std::size_t>(pixels.size()));
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMajor>(img.values.data(), pixels.rows(), pixels.cols()) = pixels;
  check_image(img, "unflatten");
  return img;
}

std::pair<Matrix, BandStats> zscore_standardize(const Matrix& X) {
  if (X.cols() < 2) throw std::invalid_argument("zscore_standardize: need at least 2 pixels");
  const Index m = X.rows();
  const Index n = X.cols();

  BandStats stats;
  stats.means.resize(m);
  stats.stds.resize(m);
  stats.degenerate.assign(static_cast<std::size_t>(m), false);

  Matrix Z(m, n);
  for (Index b = 0; b < m; ++b) {
    const double mean = X.row(b).mean();
    const auto centered = X.row(b).array() - mean;
    const double var = centered.square().sum() / static_cast<double>(n);
    const double sd = std::sqrt(var);
    stats.means(b) = mean;
    stats.stds(b) = sd;
    if (sd == 0.0) {
      stats.degenerate[static_cast<std::size_t>(b)] = true;
      Z.row(b).setZero();
    } else {
      Z.row(b) = centered / sd;
    }
  }
  return {std::move(Z), std::move(stats)};
}

}  // namespace dsfa
