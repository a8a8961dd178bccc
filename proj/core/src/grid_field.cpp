#include "qcs/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qcs/parallel.hpp"

namespace qcs {

using cplx = std::complex<double>;

ComplexGridField::ComplexGridField(cplx origin_, double spacing_, int nx_, int ny_)
    : origin(origin_), spacing(spacing_), nx(nx_), ny(ny_),
      values(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), cplx(0.0, 0.0)) {
  validate();
}

void ComplexGridField::validate() const {
  if (!(spacing > 0.0)) throw std::invalid_argument("ComplexGridField: spacing must be positive");
  if (nx <= 0 || ny <= 0) throw std::invalid_argument("ComplexGridField: nx, ny must be positive");
  if (values.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
    throw std::invalid_argument("ComplexGridField: value count does not match nx*ny");
}

bool ComplexGridField::inside(cplx z) const noexcept {
  const double fx = (z.real() - origin.real()) / spacing;
  const double fy = (z.imag() - origin.imag()) / spacing;
  return fx >= 0.0 && fy >= 0.0 && fx <= nx - 1 && fy <= ny - 1;
}

cplx ComplexGridField::interpolate(cplx z) const {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::invalid_argument("ComplexGridField::interpolate: non-finite point");
  double fx = std::clamp((z.real() - origin.real()) / spacing, 0.0, static_cast<double>(nx - 1));
  double fy = std::clamp((z.imag() - origin.imag()) / spacing, 0.0, static_cast<double>(ny - 1));
  int ix = std::min(static_cast<int>(fx), std::max(nx - 2, 0));
  int iy = std::min(static_cast<int>(fy), std::max(ny - 2, 0));
  const double tx = nx > 1 ? fx - ix : 0.0, ty = ny > 1 ? fy - iy : 0.0;
  const int ix1 = std::min(ix + 1, nx - 1), iy1 = std::min(iy + 1, ny - 1);
  return (1 - tx) * (1 - ty) * at(ix, iy) + tx * (1 - ty) * at(ix1, iy) + (1 - tx) * ty * at(ix, iy1) +
         tx * ty * at(ix1, iy1);
}

ComplexGridField make_cell_centred_grid(double x0, double x1, double y0, double y1, int nx, int ny) {
  const double h = (x1 - x0) / nx;
  if (std::abs((y1 - y0) / ny - h) > 1e-12 * h)
    throw std::invalid_argument("make_cell_centred_grid: cells must be square");
  return ComplexGridField(cplx(x0 + 0.5 * h, y0 + 0.5 * h), h, nx, ny);
}

void sample_cell_average(ComplexGridField& g, int s, const std::function<cplx(cplx)>& f, int workers) {
  if (s < 1) throw std::invalid_argument("sample_cell_average: s must be >= 1");
  const double h = g.spacing;
  parallel_for(static_cast<std::size_t>(g.ny), workers, [&](std::size_t iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const cplx c = g.node(ix, static_cast<int>(iy));
      cplx acc = 0.0;
      for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b) {
          const double ox = ((a + 0.5) / s - 0.5) * h, oy = ((b + 0.5) / s - 0.5) * h;
          acc += f(c + cplx(ox, oy));
        }
      g.at(ix, static_cast<int>(iy)) = acc / static_cast<double>(s * s);
    }
  });
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(const ComplexGridField& g, std::ostream& os) {
  os << "origin_re,origin_im,spacing,nx,ny\n";
  os << fmt17(g.origin.real()) << ',' << fmt17(g.origin.imag()) << ',' << fmt17(g.spacing) << ',' << g.nx
     << ',' << g.ny << '\n';
  os << "ix,iy,re,im\n";
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const cplx v = g.at(ix, iy);
      os << ix << ',' << iy << ',' << fmt17(v.real()) << ',' << fmt17(v.imag()) << '\n';
    }
}

ComplexGridField read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("origin_re", 0) != 0)
    throw std::runtime_error("read_csv: missing grid header");
  if (!std::getline(is, line)) throw std::runtime_error("read_csv: missing header values");
  for (char& ch : line)
    if (ch == ',') ch = ' ';
  std::istringstream hs(line);
  double ore, oim, h;
  int nx, ny;
  if (!(hs >> ore >> oim >> h >> nx >> ny)) throw std::runtime_error("read_csv: bad header values");
  ComplexGridField g(cplx(ore, oim), h, nx, ny);
  std::getline(is, line);
  std::size_t count = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    int ix, iy;
    double re, im;
    if (!(ls >> ix >> iy >> re >> im)) throw std::runtime_error("read_csv: bad data line");
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) throw std::runtime_error("read_csv: index out of range");
    g.at(ix, iy) = cplx(re, im);
    ++count;
  }
  if (count != g.values.size()) throw std::runtime_error("read_csv: node count mismatch");
  return g;
}

void write_binary(const ComplexGridField& g, std::ostream& os) {
  os.write("QCSGRID1", 8);
  const double hdr[3] = {g.origin.real(), g.origin.imag(), g.spacing};
  os.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
  const std::int64_t dims[2] = {g.nx, g.ny};
  os.write(reinterpret_cast<const char*>(dims), sizeof dims);
  os.write(reinterpret_cast<const char*>(g.values.data()),
           static_cast<std::streamsize>(g.values.size() * sizeof(cplx)));
}

ComplexGridField read_binary(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::string(magic, 8) != "QCSGRID1") throw std::runtime_error("read_binary: bad magic");
  double hdr[3];
  std::int64_t dims[2];
  is.read(reinterpret_cast<char*>(hdr), sizeof hdr);
  is.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!is) throw std::runtime_error("read_binary: truncated header");
  ComplexGridField g(cplx(hdr[0], hdr[1]), hdr[2], static_cast<int>(dims[0]), static_cast<int>(dims[1]));
  is.read(reinterpret_cast<char*>(g.values.data()), static_cast<std::streamsize>(g.values.size() * sizeof(cplx)));
  if (!is) throw std::runtime_error("read_binary: truncated data");
  return g;
}

void save_field(const ComplexGridField& g, const std::string& path) {
  const bool bin = path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
  std::ofstream os(path, bin ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("save_field: cannot open " + path);
  if (bin) write_binary(g, os); else write_csv(g, os);
}

ComplexGridField load_field(const std::string& path) {
  const bool bin = path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
  std::ifstream is(path, bin ? std::ios::binary : std::ios::in);
  if (!is) throw std::runtime_error("load_field: cannot open " + path);
  return bin ? read_binary(is) : read_csv(is);
}

}  // namespace qcs
