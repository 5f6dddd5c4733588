#pragma once

#include <stdexcept>
#include <string>

namespace mono3d {

// Base for every typed failure in the library. Parsers and geometry ops
// never crash on bad input; they throw one of the subclasses below.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// geometry
struct InvalidAngle : Error { using Error::Error; };
struct BehindCamera : Error { using Error::Error; };
struct InvalidDepth : Error { using Error::Error; };
struct InvalidDims : Error { using Error::Error; };
struct InvalidIntrinsics : Error { using Error::Error; };
struct InvalidRotation : Error { using Error::Error; };

// kitti_io
class MalformedLabel : public Error {
 public:
  MalformedLabel(const std::string& what, int line_number, int found_fields)
      : Error(what), line_number(line_number), found_fields(found_fields) {}
  int line_number = 0;
  int found_fields = 0;
};
class MissingKey : public Error {
 public:
  explicit MissingKey(const std::string& key)
      : Error("missing key: " + key), key(key) {}
  std::string key;
};
struct MalformedCalib : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };
struct TruncatedFile : Error { using Error::Error; };
struct UnknownKey : Error { using Error::Error; };
struct MalformedPose : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

// warp
struct ShapeMismatch : Error { using Error::Error; };
struct CropTooLarge : Error { using Error::Error; };
struct AllHoles : Error { using Error::Error; };

// eval
struct InvalidRect : Error { using Error::Error; };
struct DegenerateBox : Error { using Error::Error; };
class MissingFrame : public Error {
 public:
  explicit MissingFrame(const std::string& id)
      : Error("missing frame: " + id), id(id) {}
  std::string id;
};

}  // namespace mono3d
