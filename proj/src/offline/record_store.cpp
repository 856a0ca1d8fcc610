#include "offline/record_store.hpp"

#include "common/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

namespace streamcart::offline {

namespace fs = std::filesystem;

namespace {

constexpr const char* kExtension = ".json";

std::string temp_suffix() {
  static std::atomic<uint64_t> counter{0};
  std::ostringstream s;
  s << ".tmp." << std::this_thread::get_id() << "." << counter.fetch_add(1);
  return s.str();
}

} // namespace

std::string encode_product_id(const std::string& id) {
  static const char* kHex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : id) {
    if (std::isalnum(c) || c == '_' || c == '-') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

std::string decode_product_id(const std::string& stem) {
  std::string out;
  for (size_t i = 0; i < stem.size(); ++i) {
    if (stem[i] == '%' && i + 2 < stem.size()) {
      out += static_cast<char>(std::stoi(stem.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += stem[i];
    }
  }
  return out;
}

RecordStore::RecordStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_))
    fail(ErrorCode::kIo, "cannot create record store directory " + dir_.string() + ": " + ec.message());
}

fs::path RecordStore::path_for(const std::string& product_id) const {
  return dir_ / (encode_product_id(product_id) + kExtension);
}

std::mutex& RecordStore::writer_lock(const std::string& product_id) {
  std::lock_guard guard(locks_mu_);
  auto& slot = locks_[product_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

void RecordStore::save(const ProductRecord& record) {
  record.validate();
  const std::string body = nlohmann::json(record).dump(2) + "\n";
  std::lock_guard guard(writer_lock(record.product_id));
  const fs::path target = path_for(record.product_id);
  const fs::path tmp = target.string() + temp_suffix();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write " + tmp.string());
    out << body;
    out.flush();
    if (!out) fail(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::kIo, "cannot replace " + target.string());
  }
}

ProductRecord RecordStore::load(const std::string& product_id) const {
  const fs::path p = path_for(product_id);
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::kNotFound, "product '" + product_id + "' not found");
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, "corrupt record file " + p.string() + ": " + e.what());
  }
  return record_from_document(doc);
}

bool RecordStore::contains(const std::string& product_id) const {
  return fs::exists(path_for(product_id));
}

std::vector<std::string> RecordStore::list() const {
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(dir_)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && e.path().extension() == kExtension && name.find(".tmp.") == std::string::npos)
      ids.push_back(decode_product_id(e.path().stem().string()));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

} // namespace streamcart::offline
