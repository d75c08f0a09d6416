#include "nbl/svg.hpp"

#include <cstdio>
#include <functional>
#include <sstream>

namespace nbl {

namespace {

constexpr const char* kPositive = "#d95f02";
constexpr const char* kNegative = "#1b9e77";
constexpr const char* kNodal = "#000000";

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// corner(r, c) for r in [0, rows], c in [0, cols]; the grid is rendered into
// the rectangle (x0, y0, w, h). Horizontal runs of equal color are merged.
void panel(std::ostringstream& out, int rows, int cols,
           const std::function<double(int, int)>& corner, double x0, double y0, double w,
           double h, const std::string& label) {
  const double cw = w / cols, ch = h / rows;
  out << "<g>\n";
  for (int r = 0; r < rows; ++r) {
    int run_start = 0;
    const char* run_color = nullptr;
    auto flush = [&](int end) {
      if (!run_color) return;
      out << "<rect x=\"" << num(x0 + run_start * cw) << "\" y=\"" << num(y0 + r * ch)
          << "\" width=\"" << num((end - run_start) * cw) << "\" height=\"" << num(ch)
          << "\" fill=\"" << run_color << "\"/>\n";
    };
    for (int c = 0; c < cols; ++c) {
      const double v[4] = {corner(r, c), corner(r, c + 1), corner(r + 1, c), corner(r + 1, c + 1)};
      bool pos = false, neg = false, zero = false;
      for (double x : v) {
        if (x >= kZeroSite) pos = true;
        else if (x <= -kZeroSite) neg = true;
        else zero = true;
      }
      const char* color = (zero || (pos && neg)) ? kNodal : (pos ? kPositive : kNegative);
      if (color != run_color) {
        flush(c);
        run_start = c;
        run_color = color;
      }
    }
    flush(cols);
  }
  out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(w)
      << "\" height=\"" << num(h) << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << num(x0) << "\" y=\"" << num(y0 - 8)
      << "\" font-family=\"sans-serif\" font-size=\"16\">" << escape(label) << "</text>\n";
  out << "</g>\n";
}

void header(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1024 1024\" "
         "width=\"1024\" height=\"1024\">\n";
  out << "<rect width=\"1024\" height=\"1024\" fill=\"#ffffff\"/>\n";
  out << "<text x=\"32\" y=\"48\" font-family=\"sans-serif\" font-size=\"22\">" << escape(title)
      << "</text>\n";
}

}  // namespace

std::string nodal_slices_svg(const LiftedField& field, const std::string& title) {
  const BaseGrid& g = field.grid();
  const int n = g.n(), nt = field.n_theta();
  const int d = g.dim();
  std::ostringstream out;
  header(out, title);

  // Walk from the origin site using neighbor() so that wraps follow the
  // twisted identification.
  auto walk = [&](std::size_t site, int axis, int steps) {
    for (int s = 0; s < steps; ++s) site = field.neighbor(site, axis, +1);
    return site;
  };
  const std::size_t origin = field.site(0, 0);
  auto base_corner = [&](int r, int c) {
    return field.value(walk(walk(origin, 0, r), 1, c));
  };
  auto fiber_corner = [&](int r, int c) {
    return field.value(walk(walk(origin, 0, r), d, c));
  };
  panel(out, n, n, base_corner, 32, 240, 464, 464,
        d == 3 ? "theta = 0, x3 = 0 (rows x1, columns x2)" : "theta = 0 (rows x1, columns x2)");
  panel(out, n, nt, fiber_corner, 528, 240, 464, 464, "x2 = 0 (rows x1, columns theta)");
  out << "</svg>\n";
  return out.str();
}

std::string sphere_svg(const sphere::SphereHarmonic& h, const std::string& title) {
  const int np = h.grid.n_phi, nt = h.grid.n_theta;
  std::ostringstream out;
  header(out, title);
  auto corner = [&](int r, int c) { return h.value(r, c % nt); };
  panel(out, np, nt, corner, 32, 272, 960, 480, "rows colatitude, columns theta");
  out << "</svg>\n";
  return out.str();
}

}  // namespace nbl
