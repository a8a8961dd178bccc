#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace qcs {

// Complex samples at nodes origin + spacing*(ix + i*iy), stored row-major
// with index iy*nx + ix.
struct ComplexGridField {
  std::complex<double> origin{0.0, 0.0};
  double spacing = 1.0;
  int nx = 0, ny = 0;
  std::vector<std::complex<double>> values;

  ComplexGridField() = default;
  ComplexGridField(std::complex<double> origin_, double spacing_, int nx_, int ny_);

  std::size_t index(int ix, int iy) const noexcept {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix);
  }
  std::complex<double> node(int ix, int iy) const noexcept {
    return origin + std::complex<double>(spacing * ix, spacing * iy);
  }
  std::complex<double>& at(int ix, int iy) { return values[index(ix, iy)]; }
  const std::complex<double>& at(int ix, int iy) const { return values[index(ix, iy)]; }

  // Bilinear interpolation; points outside the grid are clamped to it.
  std::complex<double> interpolate(std::complex<double> z) const;
  bool inside(std::complex<double> z) const noexcept;

  void validate() const;
};

// Grid of nx*ny cells covering [x0, x1] x [y0, y1] with nodes at cell centres.
ComplexGridField make_cell_centred_grid(double x0, double x1, double y0, double y1, int nx, int ny);

// Cell average of f over s*s sub-samples per cell.
void sample_cell_average(ComplexGridField& g, int s,
                         const std::function<std::complex<double>(std::complex<double>)>& f,
                         int workers = 1);

// Text layout:
//   origin_re,origin_im,spacing,nx,ny
//   <values of the header>
//   ix,iy,re,im
//   one line per node, row-major
void write_csv(const ComplexGridField& g, std::ostream& os);
ComplexGridField read_csv(std::istream& is);

// Binary layout: "QCSGRID1", origin re/im and spacing as float64, nx and ny
// as int64, then nx*ny (re, im) float64 pairs row-major; native byte order.
void write_binary(const ComplexGridField& g, std::ostream& os);
ComplexGridField read_binary(std::istream& is);

void save_field(const ComplexGridField& g, const std::string& path);  // .csv or .bin by extension
ComplexGridField load_field(const std::string& path);

}  // namespace qcs
