#include "mnmf/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "mnmf/error.hpp"

namespace mnmf {
namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

// Reads the next whitespace-separated header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string token;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(c);
  }
  return token;
}

int header_int(std::istream& in, const char* what) {
  const std::string token = header_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size() || v <= 0) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string("pgm: bad ") + what + " '" + token + "'");
  }
}

void check_patch(int k, int rows, int cols) {
  if (k <= 0 || k > std::min(rows, cols)) {
    throw std::invalid_argument("patch size " + std::to_string(k) + " does not fit a " +
                                std::to_string(rows) + "x" + std::to_string(cols) + " image");
  }
}

void extract(const ImageGrid& image, int k, int r0, int c0, Eigen::Ref<Vector> out) {
  for (int a = 0; a < k; ++a) {
    const int r = wrap(r0 + a, image.rows());
    for (int b = 0; b < k; ++b) out(a * k + b) = image.pixels(r, wrap(c0 + b, image.cols()));
  }
}

std::vector<int> stride_positions(int extent, int k, int stride) {
  std::vector<int> pos;
  for (int p = 0; p + k <= extent; p += stride) pos.push_back(p);
  if (pos.back() != extent - k) pos.push_back(extent - k);
  return pos;
}

}  // namespace

ImageGrid read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  if (header_token(in) != "P5") throw DataError(path.string() + ": not a binary PGM (P5)");
  const int cols = header_int(in, "width");
  const int rows = header_int(in, "height");
  const int maxval = header_int(in, "maxval");
  if (maxval > 255) throw DataError(path.string() + ": only 8-bit PGM is supported");
  std::vector<unsigned char> raw(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw DataError(path.string() + ": truncated pixel data");
  }
  ImageGrid img{Matrix(rows, cols)};
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      img.pixels(r, c) = static_cast<double>(raw[static_cast<std::size_t>(r) * cols + c]) / maxval;
    }
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const ImageGrid& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  for (int r = 0; r < image.rows(); ++r) {
    for (int c = 0; c < image.cols(); ++c) {
      const double p = std::clamp(image.pixels(r, c), 0.0, 1.0);
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * p))));
    }
  }
  if (!out) throw DataError("write failed: " + path.string());
}

void PatchWalker::step(Rng& rng) {
  switch (uniform_index(rng, 4)) {
    case 0: row = wrap(row - 1, grid_rows); break;
    case 1: row = wrap(row + 1, grid_rows); break;
    case 2: col = wrap(col - 1, grid_cols); break;
    default: col = wrap(col + 1, grid_cols); break;
  }
}

Matrix image_patch_minibatch(const ImageGrid& image, int k, int count, PatchSampling mode,
                             PatchWalker& walker, Rng& rng,
                             std::vector<std::pair<int, int>>* positions) {
  check_patch(k, image.rows(), image.cols());
  if (count <= 0) throw std::invalid_argument("patch count must be positive");
  walker.k = k;
  walker.grid_rows = image.rows();
  walker.grid_cols = image.cols();
  Matrix X(k * k, count);
  for (int j = 0; j < count; ++j) {
    int r0 = 0;
    int c0 = 0;
    if (mode == PatchSampling::walk) {
      walker.step(rng);
      r0 = walker.row;
      c0 = walker.col;
    } else {
      r0 = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(image.rows())));
      c0 = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(image.cols())));
    }
    extract(image, k, r0, c0, X.col(j));
    if (positions) positions->emplace_back(r0, c0);
  }
  return X;
}

ImageGrid reconstruct_grid(const ImageGrid& image, const Matrix& W, int k, int stride,
                           const CodingOptions& coding) {
  check_patch(k, image.rows(), image.cols());
  if (W.rows() != k * k) throw std::invalid_argument("reconstruct_grid: W must have k² rows");
  if (stride <= 0) throw std::invalid_argument("stride must be positive");
  const auto rows = stride_positions(image.rows(), k, stride);
  const auto cols = stride_positions(image.cols(), k, stride);
  Matrix X(k * k, static_cast<Eigen::Index>(rows.size() * cols.size()));
  Eigen::Index j = 0;
  for (int r0 : rows) {
    for (int c0 : cols) extract(image, k, r0, c0, X.col(j++));
  }
  const Matrix approx = W * sparse_code(X, W, coding).H;
  Matrix sum = Matrix::Zero(image.rows(), image.cols());
  Matrix count = Matrix::Zero(image.rows(), image.cols());
  j = 0;
  for (int r0 : rows) {
    for (int c0 : cols) {
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
          sum(r0 + a, c0 + b) += approx(a * k + b, j);
          count(r0 + a, c0 + b) += 1.0;
        }
      }
      ++j;
    }
  }
  return ImageGrid{(sum.array() / count.array()).cwiseMax(0.0).cwiseMin(1.0).matrix()};
}

ImageGrid atom_grid(const Matrix& W, int k) {
  if (k <= 0 || W.rows() != k * k) throw std::invalid_argument("atom_grid: W must have k² rows");
  const int r = static_cast<int>(W.cols());
  const int per_row = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(r)))));
  const int grid_rows = (r + per_row - 1) / per_row;
  ImageGrid out{Matrix::Ones(grid_rows * (k + 1) - 1, per_row * (k + 1) - 1)};
  for (int i = 0; i < r; ++i) {
    const double lo = W.col(i).minCoeff();
    const double span = W.col(i).maxCoeff() - lo;
    const int top = (i / per_row) * (k + 1);
    const int left = (i % per_row) * (k + 1);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        out.pixels(top + a, left + b) = span > 0.0 ? (W(a * k + b, i) - lo) / span : 0.0;
      }
    }
  }
  return out;
}

}  // namespace mnmf
