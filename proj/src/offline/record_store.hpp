#pragma once

#include "offline/record.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace streamcart::offline {

// One JSON document per product in a directory. A save writes a temporary
// file and renames it over the old one, so a concurrent load sees either
// the old or the new document in full. Saves to the same product_id are
// serialized inside the process.
class RecordStore {
public:
  explicit RecordStore(std::filesystem::path dir);

  void save(const ProductRecord& record);
  ProductRecord load(const std::string& product_id) const;
  bool contains(const std::string& product_id) const;
  std::vector<std::string> list() const;

  const std::filesystem::path& directory() const { return dir_; }
  std::filesystem::path path_for(const std::string& product_id) const;

private:
  std::mutex& writer_lock(const std::string& product_id);

  std::filesystem::path dir_;
  std::mutex locks_mu_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

// Reversible filename encoding: [A-Za-z0-9_-] kept, every other byte %XX.
std::string encode_product_id(const std::string& product_id);
std::string decode_product_id(const std::string& stem);

} // namespace streamcart::offline
