#pragma once

#include <array>
#include <cmath>
#include <iosfwd>
#include <utility>
#include <vector>

#include "crossview/error.hpp"

namespace crossview {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2& a, const Point2& b) {
        return a.x == b.x && a.y == b.y;
    }
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline bool is_finite(const Point2& p) {
    return std::isfinite(p.x) && std::isfinite(p.y);
}

inline bool is_finite(const Point3& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

/// Distance metric used by calibration and the consistency check.
enum class Metric { manhattan, euclidean };

double manhattan_distance(const Point2& p, const Point2& q);
double euclidean_distance(const Point2& p, const Point2& q);
double distance(const Point2& p, const Point2& q, Metric metric = Metric::manhattan);

Metric metric_from_string(const std::string& name);

/// 3x3 projective map, row-major. Instances produced by the factory
/// functions below are canonical: Frobenius norm 1, first nonzero
/// coefficient positive.
struct Homography {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double at(int row, int col) const { return m[3 * row + col]; }

    static Homography identity();
    static Homography translation(double dx, double dy);
};

/// Scales to unit Frobenius norm and fixes the sign of the first nonzero
/// coefficient. Throws on the zero matrix or a singular matrix
/// (|det| <= 1e-12 after normalization).
Homography canonical_homography(const std::array<double, 9>& coeffs);

double determinant(const Homography& h);

Point2 apply_homography(const Homography& h, const Point2& p);

Homography invert_homography(const Homography& h);

/// Normalized DLT over (source, target) pairs: H maps source points to
/// target points. Requires >= 4 pairs with no 3 source points collinear.
Homography estimate_homography(const std::vector<std::pair<Point2, Point2>>& pairs);

// Plain text format: 3 lines x 3 coefficients. Canonicalized on read.
Homography read_homography(std::istream& in);
void write_homography(std::ostream& out, const Homography& h);
Homography load_homography(const std::string& path);
void save_homography(const std::string& path, const Homography& h);

/// Pinhole camera: p = (fx*Xc/Zc + cx, fy*Yc/Zc + cy), Xc = R*x + t.
struct CameraModel {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    std::array<double, 9> rotation{1, 0, 0, 0, 1, 0, 0, 0, 1};  // row-major, world->camera
    std::array<double, 3> translation{0, 0, 0};
};

/// Throws unless the rotation is orthonormal within 1e-9 and fx, fy > 0.
void validate_camera(const CameraModel& cam);

Point3 world_to_camera(const CameraModel& cam, const Point3& x);

Point2 project_point(const CameraModel& cam, const Point3& x);

/// Builds a camera at `pos` whose optical axis points at `target`.
CameraModel make_look_at_camera(double fx, double fy, double cx, double cy,
                                const Point3& pos, const Point3& target,
                                const Point3& up = {0, 0, 1});

}  // namespace crossview
