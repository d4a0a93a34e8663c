#include "mip/names.hpp"

#include <set>
#include <stdexcept>

namespace mip {

namespace {

const std::vector<std::string> kFirst = {
    "Robert",  "Troy",    "Alice",   "Brian",   "Carla",  "Derek",   "Elena",
    "Felix",   "Grace",   "Henry",   "Irene",   "Jacob",  "Karen",   "Liam",
    "Maria",   "Nathan",  "Olivia",  "Peter",   "Quinn",  "Rachel",  "Samuel",
    "Tanya",   "Ulysses", "Violet",  "Walter",  "Xenia",  "Yusuf",   "Zoe",
    "Andre",   "Bianca",  "Colin",   "Diana",   "Edgar",  "Fiona",   "Gustav",
    "Helena",  "Igor",    "Julia",   "Kevin",   "Laura",  "Marcus",  "Nadia",
    "Oscar",   "Paula",   "Ramon",   "Sofia",   "Tomas",  "Ursula",  "Victor",
    "Wendy",   "Yvonne",  "Abel",    "Bruno",   "Clara",  "Dmitri",  "Esther"};

const std::vector<std::string> kLast = {
    "North",    "Donovan",  "Smith",    "Johnson",  "Brown",   "Davis",
    "Miller",   "Wilson",   "Moore",    "Taylor",   "Anderson", "Thomas",
    "Jackson",  "White",    "Harris",   "Martin",   "Thompson", "Garcia",
    "Martinez", "Robinson", "Clark",    "Rodriguez", "Lewis",   "Lee",
    "Walker",   "Hall",     "Allen",    "Young",    "King",    "Wright",
    "Scott",    "Torres",   "Nguyen",   "Hill",     "Flores",  "Green",
    "Adams",    "Nelson",   "Baker",    "Rivera",   "Campbell", "Mitchell",
    "Carter",   "Roberts",  "Gomez",    "Phillips", "Evans",   "Turner",
    "Diaz",     "Parker",   "Cruz",     "Edwards",  "Collins", "Reyes",
    "Stewart",  "Morris",   "Morales",  "Murphy",   "Cook",    "Rogers",
    "Gutierrez", "Ortiz",   "Morgan",   "Cooper"};

}  // namespace

const std::vector<std::string>& first_name_pool() { return kFirst; }
const std::vector<std::string>& last_name_pool() { return kLast; }

std::string random_full_name(RngStream& rng) {
    return kFirst[rng.uniform_int(kFirst.size())] + " " +
           kLast[rng.uniform_int(kLast.size())];
}

std::vector<std::string> unique_full_names(size_t n, RngStream& rng) {
    if (n > kFirst.size() * kLast.size()) {
        throw std::invalid_argument("name pool exhausted");
    }
    std::vector<std::string> out;
    out.reserve(n);
    std::set<std::string> seen;
    while (out.size() < n) {
        std::string name = random_full_name(rng);
        if (seen.insert(name).second) out.push_back(std::move(name));
    }
    return out;
}

}  // namespace mip
