#pragma once

// Exact overlap measures between balls and axis-aligned boxes.

#include "regladder/field.hpp"

namespace regladder::geometry {

/// Length of [a0,a1] ∩ [b0,b1].
double interval_overlap(double a0, double a1, double b0, double b1);

/// Area of the disk (cx,cy,R) intersected with [x0,x1]x[y0,y1], exact.
double disk_rect_area(double cx, double cy, double r, double x0, double x1, double y0, double y1);

/// Area of the intersection of two disks whose centers are `d` apart.
double lens_area(double r1, double r2, double d);

/// Volume of the intersection of two 3D balls whose centers are `d` apart.
double sphere_intersection_volume(double r1, double r2, double d);

/// Volume of ball ∩ box in 3D. Cells wholly inside or outside are exact;
/// partial cells use an m^3 midpoint sub-grid.
double ball_box_volume_3d(const Point& c, double r, const Point& lo, const Point& hi, int m = 8);

/// |ball ∩ box| in dimension dim (exact for dim <= 2).
double ball_box_measure(int dim, const Point& c, double r, const Point& lo, const Point& hi);

/// |ball(c1,r1) ∩ ball(c2,r2)| in dimension dim.
double ball_ball_measure(int dim, const Point& c1, double r1, const Point& c2, double r2);

}  // namespace regladder::geometry
