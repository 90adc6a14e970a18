#include "se2conv/tensor_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace se2conv {

namespace {

constexpr char kMagic[4] = {'S', 'E', '2', 'T'};

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw io_error("truncated SE2T stream");
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

template <typename T>
void put_scalar(std::ostream& out, T v) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  // Little-endian host assumed for the raw copy; byte-swap if ever ported.
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get_scalar(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw io_error("truncated SE2T payload");
  return v;
}

std::vector<std::size_t> read_header(std::istream& in, int& precision) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw io_error("bad SE2T magic");
  std::uint32_t rank = get_u32(in);
  if (rank > 16) throw io_error("implausible SE2T rank " + std::to_string(rank));
  std::vector<std::size_t> shape(rank);
  for (auto& d : shape) d = get_u32(in);
  char flag;
  in.read(&flag, 1);
  if (!in) throw io_error("truncated SE2T stream");
  precision = flag;
  if (precision != 4 && precision != 8)
    throw io_error("bad SE2T precision flag " + std::to_string(precision));
  return shape;
}

}  // namespace

template <typename T>
void write_se2t(std::ostream& out, const Tensor<T>& t) {
  out.write(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
  char flag = static_cast<char>(sizeof(T));
  out.write(&flag, 1);
  for (std::size_t i = 0; i < t.size(); ++i) put_scalar(out, t[i]);
  if (!out) throw io_error("SE2T write failed");
}

int peek_se2t_precision(std::istream& in) {
  auto pos = in.tellg();
  int precision = 0;
  read_header(in, precision);
  in.seekg(pos);
  return precision;
}

template <typename T>
Tensor<T> read_se2t(std::istream& in) {
  int precision = 0;
  auto shape = read_header(in, precision);
  if (precision != static_cast<int>(sizeof(T)))
    throw io_error("SE2T precision " + std::to_string(precision) + " does not match requested " +
                   std::to_string(sizeof(T)));
  Tensor<T> t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = get_scalar<T>(in);
  return t;
}

template <typename T>
Tensor<T> read_se2t_any(std::istream& in) {
  int precision = 0;
  auto shape = read_header(in, precision);
  Tensor<T> t(shape);
  if (precision == 4)
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(get_scalar<float>(in));
  else
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(get_scalar<double>(in));
  return t;
}

template <typename T>
void write_se2t_file(const std::string& path, const Tensor<T>& t) {
  std::ostringstream buf(std::ios::binary);
  write_se2t(buf, t);
  atomic_write_file(path, buf.str());
}

template <typename T>
Tensor<T> read_se2t_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  return read_se2t<T>(in);
}

template <typename T>
Tensor<T> read_se2t_file_any(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  return read_se2t_any<T>(in);
}

Tensor<float> read_pnm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::string tag;
  in >> tag;
  if (tag != "P5" && tag != "P6") throw io_error("unsupported PNM type " + tag);
  auto next_int = [&in, &path]() {
    // Skips whitespace and '#' comment lines.
    for (;;) {
      int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    long v;
    if (!(in >> v)) throw io_error("malformed PNM header in " + path);
    return v;
  };
  long w = next_int();
  long h = next_int();
  long maxval = next_int();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw io_error("unsupported PNM geometry in " + path);
  in.get();  // single whitespace after maxval
  std::size_t channels = (tag == "P6") ? 3 : 1;
  std::vector<char> raw(static_cast<std::size_t>(w) * h * channels);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!in) throw io_error("truncated PNM payload in " + path);
  Tensor<float> img({static_cast<std::size_t>(h), static_cast<std::size_t>(w), channels});
  for (std::size_t i = 0; i < img.size(); ++i)
    img[i] = static_cast<float>(static_cast<unsigned char>(raw[i])) / static_cast<float>(maxval);
  return img;
}

void write_ppm_file(const std::string& path, const Tensor<float>& img) {
  if (img.rank() != 3 || (img.dim(2) != 1 && img.dim(2) != 3))
    throw std::invalid_argument("write_ppm_file expects [H,W,1] or [H,W,3], got " +
                                shape_str(img.shape()));
  std::size_t h = img.dim(0), w = img.dim(1), c = img.dim(2);
  std::ostringstream out(std::ios::binary);
  out << "P6\n" << w << " " << h << "\n255\n";
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t col = 0; col < w; ++col)
      for (std::size_t ch = 0; ch < 3; ++ch) {
        float v = img.at({r, col, c == 3 ? ch : 0});
        v = v < 0.f ? 0.f : (v > 1.f ? 1.f : v);
        out.put(static_cast<char>(static_cast<int>(v * 255.0f + 0.5f)));
      }
  atomic_write_file(path, out.str());
}

void atomic_write_file(const std::string& path, const std::string& bytes) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open " + tmp + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw io_error("cannot rename " + tmp + " to " + path);
  }
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template void write_se2t<float>(std::ostream&, const Tensor<float>&);
template void write_se2t<double>(std::ostream&, const Tensor<double>&);
template Tensor<float> read_se2t<float>(std::istream&);
template Tensor<double> read_se2t<double>(std::istream&);
template Tensor<float> read_se2t_any<float>(std::istream&);
template Tensor<double> read_se2t_any<double>(std::istream&);
template void write_se2t_file<float>(const std::string&, const Tensor<float>&);
template void write_se2t_file<double>(const std::string&, const Tensor<double>&);
template Tensor<float> read_se2t_file<float>(const std::string&);
template Tensor<double> read_se2t_file<double>(const std::string&);
template Tensor<float> read_se2t_file_any<float>(const std::string&);
template Tensor<double> read_se2t_file_any<double>(const std::string&);

}  // namespace se2conv
