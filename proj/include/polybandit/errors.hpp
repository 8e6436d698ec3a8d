#pragma once

#include <stdexcept>
#include <string>

namespace polybandit {

/// Mismatched vector/matrix sizes or an out-of-range axis index.
class DimensionError : public std::invalid_argument
{
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Base of every geometric rejection (unbounded, infeasible, degenerate, ...).
class GeometryError : public std::runtime_error
{
public:
    explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

class UnboundedPolyhedron : public GeometryError
{
public:
    explicit UnboundedPolyhedron(const std::string& what) : GeometryError(what) {}
};

class InfeasiblePolyhedron : public GeometryError
{
public:
    explicit InfeasiblePolyhedron(const std::string& what) : GeometryError(what) {}
};

/// A point that should be inside the polyhedron is not.
class OutsidePolyhedron : public GeometryError
{
public:
    explicit OutsidePolyhedron(const std::string& what) : GeometryError(what) {}
};

/// The anchor sits on the facet facing the requested axis direction.
class DegenerateReach : public GeometryError
{
public:
    explicit DegenerateReach(const std::string& what) : GeometryError(what) {}
};

/// No point has positive room along every axis direction.
class DegenerateAnchor : public GeometryError
{
public:
    explicit DegenerateAnchor(const std::string& what) : GeometryError(what) {}
};

/// Vertex enumeration refused because C(M, N) or N is too large.
class VertexBlowup : public GeometryError
{
public:
    explicit VertexBlowup(const std::string& what) : GeometryError(what) {}
};

/// Best and second-best vertex values coincide (gap of zero).
class TiedOptimum : public GeometryError
{
public:
    explicit TiedOptimum(const std::string& what) : GeometryError(what) {}
};

class SingularSystem : public std::runtime_error
{
public:
    explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};

class EstimatorError : public std::runtime_error
{
public:
    explicit EstimatorError(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error
{
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polybandit
