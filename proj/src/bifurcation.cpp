#include "bimodal/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include "bimodal/control.hpp"
#include "bimodal/geometry.hpp"

namespace bimodal {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

DiagramPoint evaluate(const Cf10pFamily& family, double a4, double b1, double x1, double x2,
                      double x5, double eps) {
  const Triple x = family(x1, x2, x5);
  const ClassificationResult c = classify(x, eps);
  const ControllabilityReport r = is_controllable_explicit(x, eps);

  const double s = x.scale();
  const ZeroTest near(10.0 * eps, s);
  const double k = a4 / (b1 * b1);
  const bool boundary = r.boundary || near.zero(x1) || near.zero(x2) || near.zero(x5) ||
                        near.zero(x1 - x2 * x5, 2) || near.zero(1.0 + k * x5 * x5, 2) ||
                        near.zero(x2 + k * x1 * x5, 2);
  return {x1, x2, x5, c.form.label, r.controllable, boundary};
}

/// Fill colour per stratum.
const char* colour(CanonicalLabel label) {
  switch (label) {
    case CanonicalLabel::CF2: return "#d9e6f2";
    case CanonicalLabel::CF3: return "#1f77b4";
    case CanonicalLabel::CF4: return "#17becf";
    case CanonicalLabel::CF5: return "#2ca02c";
    case CanonicalLabel::CF5p: return "#ff7f0e";
    case CanonicalLabel::CF6: return "#9467bd";
    case CanonicalLabel::CF7: return "#8c564b";
    case CanonicalLabel::CF8: return "#d62728";
    case CanonicalLabel::CF10p: return "#000000";
    default: return "#7f7f7f";
  }
}

}  // namespace

double controllability_region(double a4, double b1, double x1, double x2, double x5) {
  const double k = a4 / (b1 * b1);
  return (x2 + k * x1 * x5) * (1.0 + k * x5 * x5);
}

BifurcationDiagram sweep_cf10p(double a4, double b1, const SweepGrid& grid, double eps,
                               unsigned threads) {
  const Cf10pFamily family(a4, b1);  // ZeroB1 for b1 == 0
  BifurcationDiagram out{a4, b1, grid, {}};
  const std::size_t total = grid.size();
  out.points.resize(total);
  if (total == 0) return out;

  const auto n2 = static_cast<std::size_t>(grid.x2.points);
  const auto n5 = static_cast<std::size_t>(grid.x5.points);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const std::size_t i = idx / (n2 * n5);
      const std::size_t j = (idx / n5) % n2;
      const std::size_t k = idx % n5;
      out.points[idx] = evaluate(family, a4, b1, grid.x1.value(static_cast<int>(i)),
                                 grid.x2.value(static_cast<int>(j)),
                                 grid.x5.value(static_cast<int>(k)), eps);
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, (total + 255) / 256));
  if (threads <= 1) {
    work(0, total);
    return out;
  }
  // Exceptions are not expected here, but must not escape a thread.
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  const std::size_t chunk = (total + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(total, begin + chunk);
    pool.emplace_back([&, t, begin, end] {
      try {
        work(begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void write_csv(const BifurcationDiagram& diagram, std::ostream& out) {
  out << "x1,x2,x5,label,controllable,boundary\n";
  for (const auto& p : diagram.points) {
    out << fmt(p.x1) << ',' << fmt(p.x2) << ',' << fmt(p.x5) << ',' << stratum_name(p.label)
        << ',' << (p.controllable ? 1 : 0) << ',' << (p.boundary ? 1 : 0) << '\n';
  }
}

void write_svg(const BifurcationDiagram& diagram, double slice_x5, std::ostream& out) {
  const SweepGrid& g = diagram.grid;
  const int n1 = std::max(g.x1.points, 0);
  const int n2 = std::max(g.x2.points, 0);
  const int n5 = std::max(g.x5.points, 0);

  int slice = 0;
  for (int k = 1; k < n5; ++k) {
    if (std::abs(g.x5.value(k) - slice_x5) < std::abs(g.x5.value(slice) - slice_x5)) slice = k;
  }
  const double x5 = n5 > 0 ? g.x5.value(slice) : slice_x5;

  const double size = 600.0, margin = 50.0, legend = 140.0;
  const double w1 = g.x1.hi - g.x1.lo, w2 = g.x2.hi - g.x2.lo;
  auto px = [&](double x1) { return margin + (w1 != 0.0 ? (x1 - g.x1.lo) / w1 : 0.5) * size; };
  auto py = [&](double x2) {
    return margin + size - (w2 != 0.0 ? (x2 - g.x2.lo) / w2 : 0.5) * size;
  };
  const double cw = n1 > 1 ? size / (n1 - 1) : size;
  const double ch = n2 > 1 ? size / (n2 - 1) : size;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(size + 2 * margin + legend)
      << "\" height=\"" << fmt(size + 2 * margin) << "\">\n";
  out << "<title>CF10' deformation, a4=" << fmt(diagram.a4) << " b1=" << fmt(diagram.b1)
      << " x5=" << fmt(x5) << "</title>\n";
  out << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  std::map<std::string, const char*> used;
  out << "<g stroke=\"none\">\n";
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const auto idx = (static_cast<std::size_t>(i) * n2 + j) * n5 + slice;
      const DiagramPoint& p = diagram.points[idx];
      const char* c = colour(p.label);
      used.emplace(stratum_name(p.label), c);
      out << "<rect x=\"" << fmt(px(p.x1) - cw / 2) << "\" y=\"" << fmt(py(p.x2) - ch / 2)
          << "\" width=\"" << fmt(cw) << "\" height=\"" << fmt(ch) << "\" fill=\"" << c
          << "\"/>\n";
    }
  }
  out << "</g>\n<g fill=\"#000000\">\n";
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const auto idx = (static_cast<std::size_t>(i) * n2 + j) * n5 + slice;
      const DiagramPoint& p = diagram.points[idx];
      if (p.controllable) {
        out << "<circle cx=\"" << fmt(px(p.x1)) << "\" cy=\"" << fmt(py(p.x2)) << "\" r=\""
            << fmt(std::min(cw, ch) / 6) << "\"/>\n";
      }
    }
  }
  out << "</g>\n";

  // Clip the analytic curves to the plotted box.
  out << "<clipPath id=\"box\"><rect x=\"" << fmt(margin) << "\" y=\"" << fmt(margin)
      << "\" width=\"" << fmt(size) << "\" height=\"" << fmt(size) << "\"/></clipPath>\n";
  out << "<g clip-path=\"url(#box)\" fill=\"none\" stroke-width=\"2\">\n";
  // x1 = x2 x5, i.e. x2 = x1 / x5 (the x1 = 0 axis when x5 = 0)
  if (x5 != 0.0) {
    out << "<line x1=\"" << fmt(px(g.x1.lo)) << "\" y1=\"" << fmt(py(g.x1.lo / x5)) << "\" x2=\""
        << fmt(px(g.x1.hi)) << "\" y2=\"" << fmt(py(g.x1.hi / x5))
        << "\" stroke=\"#e377c2\"/>\n";
  } else {
    out << "<line x1=\"" << fmt(px(0.0)) << "\" y1=\"" << fmt(py(g.x2.lo)) << "\" x2=\""
        << fmt(px(0.0)) << "\" y2=\"" << fmt(py(g.x2.hi)) << "\" stroke=\"#e377c2\"/>\n";
  }
  // controllability boundary x2 = -(a4/b1^2) x1 x5
  const double k = diagram.a4 / (diagram.b1 * diagram.b1);
  out << "<line x1=\"" << fmt(px(g.x1.lo)) << "\" y1=\"" << fmt(py(-k * g.x1.lo * x5))
      << "\" x2=\"" << fmt(px(g.x1.hi)) << "\" y2=\"" << fmt(py(-k * g.x1.hi * x5))
      << "\" stroke=\"#bcbd22\" stroke-dasharray=\"6 4\"/>\n";
  out << "</g>\n";

  out << "<rect x=\"" << fmt(margin) << "\" y=\"" << fmt(margin) << "\" width=\"" << fmt(size)
      << "\" height=\"" << fmt(size) << "\" fill=\"none\" stroke=\"#000000\"/>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"14\">\n";
  out << "<text x=\"" << fmt(margin + size / 2) << "\" y=\"" << fmt(size + 2 * margin - 12)
      << "\" text-anchor=\"middle\">x1</text>\n";
  out << "<text x=\"14\" y=\"" << fmt(margin + size / 2) << "\">x2</text>\n";
  double ly = margin;
  for (const auto& [name, c] : used) {
    out << "<rect x=\"" << fmt(size + 2 * margin) << "\" y=\"" << fmt(ly) << "\" width=\"14\""
        << " height=\"14\" fill=\"" << c << "\" stroke=\"#000000\"/>\n";
    out << "<text x=\"" << fmt(size + 2 * margin + 20) << "\" y=\"" << fmt(ly + 12) << "\">"
        << name << "</text>\n";
    ly += 22;
  }
  out << "<circle cx=\"" << fmt(size + 2 * margin + 7) << "\" cy=\"" << fmt(ly + 7)
      << "\" r=\"3\"/>\n<text x=\"" << fmt(size + 2 * margin + 20) << "\" y=\"" << fmt(ly + 12)
      << "\">controllable</text>\n";
  out << "</g>\n</svg>\n";
}

void emit_diagram(const BifurcationDiagram& diagram, DiagramFormat format,
                  const std::filesystem::path& path, double slice_x5) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing",
                "emit_diagram");
  }
  if (format == DiagramFormat::Csv) write_csv(diagram, file);
  else write_svg(diagram, slice_x5, file);
  file.flush();
  if (!file) {
    throw Error(ErrorCode::IoFailure, "write to " + path.string() + " failed", "emit_diagram");
  }
}

}  // namespace bimodal
