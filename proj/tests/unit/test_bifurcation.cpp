#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bimodal/bifurcation.hpp"
#include "bimodal/control.hpp"
#include "bimodal/geometry.hpp"
#include "support/bullets.hpp"

namespace bimodal {
namespace {

using L = CanonicalLabel;

TEST(Sweep, BulletCasesNegativeA4) {
  testing::Rng rng(31);
  const Cf10pFamily f(-1.0, 1.0);
  for (int c = 0; c < 10; ++c) {
    for (int k = 0; k < 50; ++k) {
      const auto p = testing::bullet_point(c, -1.0, 1.0, rng);
      EXPECT_EQ(classify(f(p[0], p[1], p[2])).form.label, testing::kBulletCases[c].expected)
          << testing::kBulletCases[c].name << " at " << p[0] << "," << p[1] << "," << p[2];
    }
  }
}

TEST(Sweep, BulletCasesOtherBase) {
  testing::Rng rng(32);
  const double a4 = -2.5, b1 = 0.7;
  const Cf10pFamily f(a4, b1);
  for (int c = 0; c < 10; ++c) {
    for (int k = 0; k < 20; ++k) {
      const auto p = testing::bullet_point(c, a4, b1, rng);
      EXPECT_EQ(classify(f(p[0], p[1], p[2])).form.label, testing::kBulletCases[c].expected)
          << testing::kBulletCases[c].name;
    }
  }
}

TEST(Sweep, DerivedExample) {
  SweepGrid g{{0.5, 0.5, 1}, {2, 2, 1}, {0.1, 0.1, 1}};
  const auto d = sweep_cf10p(-1, 1, g);
  ASSERT_EQ(d.points.size(), 1u);
  EXPECT_EQ(d.points[0].label, L::CF2);
  EXPECT_TRUE(d.points[0].controllable);
  EXPECT_GT(controllability_region(-1, 1, 0.5, 2, 0.1), 0.0);
}

TEST(Sweep, ZeroB1) {
  try {
    sweep_cf10p(1.0, 0.0, SweepGrid{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroB1);
  }
}

TEST(Sweep, OrderAndLabelsConsistent) {
  SweepGrid g{{-2, 2, 9}, {-2, 2, 7}, {-2, 2, 5}};
  const auto d = sweep_cf10p(-1, 1, g, kDefaultEps, 4);
  ASSERT_EQ(d.points.size(), 9u * 7u * 5u);
  const Cf10pFamily f(-1, 1);
  std::size_t idx = 0;
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 7; ++j) {
      for (int k = 0; k < 5; ++k, ++idx) {
        const auto& p = d.points[idx];
        EXPECT_EQ(p.x1, g.x1.value(i));
        EXPECT_EQ(p.x2, g.x2.value(j));
        EXPECT_EQ(p.x5, g.x5.value(k));
        EXPECT_EQ(p.label, classify(f(p.x1, p.x2, p.x5)).form.label);
      }
    }
  }
}

TEST(Sweep, ThreadCountDoesNotChangeOutput) {
  SweepGrid g{{-2, 2, 21}, {-2, 2, 21}, {-2, 2, 21}};
  std::ostringstream a, b;
  write_csv(sweep_cf10p(-1, 1, g, kDefaultEps, 1), a);
  write_csv(sweep_cf10p(-1, 1, g, kDefaultEps, 8), b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Sweep, ControllabilityMatchesClosedForm) {
  SweepGrid g{{-2, 2, 17}, {-2, 2, 17}, {-2, 2, 17}};
  for (const double a4 : {-1.0, 0.5}) {
    const auto d = sweep_cf10p(a4, 1.3, g);
    for (const auto& p : d.points) {
      if (p.boundary) continue;
      EXPECT_EQ(p.controllable, controllability_region(a4, 1.3, p.x1, p.x2, p.x5) > 0.0);
    }
  }
}

TEST(Sweep, NoSurfaceStrataForPositiveA4) {
  SweepGrid g{{-2, 2, 21}, {-2, 2, 21}, {-2, 2, 21}};
  const auto d = sweep_cf10p(0.8, 1.0, g);
  for (const auto& p : d.points) {
    EXPECT_NE(p.label, L::CF4);
    EXPECT_NE(p.label, L::CF7);
  }
}

TEST(Sweep, LabelsDrawnFromFamilyStrata) {
  SweepGrid g{{-2, 2, 41}, {-2, 2, 41}, {-2, 2, 41}};
  const auto d = sweep_cf10p(-1, 1, g);
  for (const auto& p : d.points) {
    const bool ok = p.label == L::CF2 || p.label == L::CF3 || p.label == L::CF4 ||
                    p.label == L::CF5 || p.label == L::CF5p || p.label == L::CF6 ||
                    p.label == L::CF7 || p.label == L::CF8 || p.label == L::CF10p;
    EXPECT_TRUE(ok) << to_string(p.label);
  }
  // the base point is CF10'
  EXPECT_EQ(d.points[(20 * 41 + 20) * 41 + 20].label, L::CF10p);
}

TEST(Csv, EmptyAndSmallGrids) {
  std::ostringstream empty;
  write_csv(sweep_cf10p(-1, 1, SweepGrid{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}), empty);
  EXPECT_EQ(empty.str(), "x1,x2,x5,label,controllable,boundary\n");
  std::ostringstream three;
  write_csv(sweep_cf10p(-1, 1, SweepGrid{{-1, 1, 3}, {0.5, 0.5, 1}, {0, 0, 1}}), three);
  EXPECT_EQ(three.str(),
            "x1,x2,x5,label,controllable,boundary\n"
            "-1,0.5,0,E5',1,1\n"
            "0,0.5,0,E8,1,1\n"
            "1,0.5,0,E5',1,1\n");
}

TEST(Svg, DeterministicAndWellFormed) {
  SweepGrid g{{-2, 2, 11}, {-2, 2, 11}, {-2, 2, 5}};
  const auto d = sweep_cf10p(-1, 1, g);
  std::ostringstream a, b;
  write_svg(d, 1.0, a);
  write_svg(d, 1.0, b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().rfind("<svg", 0), 0u);
  EXPECT_NE(a.str().find("</svg>"), std::string::npos);
  EXPECT_NE(a.str().find("x5=1"), std::string::npos);
}

TEST(Emit, WritesFileAndReportsIoFailure) {
  const auto d = sweep_cf10p(-1, 1, SweepGrid{{-1, 1, 3}, {-1, 1, 3}, {0, 0, 1}});
  const auto path = std::filesystem::temp_directory_path() / "bimodal_test_emit.csv";
  emit_diagram(d, DiagramFormat::Csv, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "x1,x2,x5,label,controllable,boundary");
  std::filesystem::remove(path);
  try {
    emit_diagram(d, DiagramFormat::Svg, "/nonexistent-dir/x.svg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoFailure);
  }
}

}  // namespace
}  // namespace bimodal
