#pragma once

#include <stdexcept>
#include <string>

namespace eitshape {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid argument or violated precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Spatial gradient of the implicit function vanished where a surface normal is needed.
class RegularityError : public Error {
public:
    using Error::Error;
};

// Isosurface extraction or mesh validation failure.
class MeshError : public Error {
public:
    using Error::Error;
};

// Boundary-integral assembly or solve failure.
class BemError : public Error {
public:
    using Error::Error;
};

// Experiment configuration problem (unknown key, missing file, bad value).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace eitshape
