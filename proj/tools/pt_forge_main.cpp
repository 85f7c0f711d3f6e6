#include "ptforge/shell.hpp"

int main(int argc, char** argv) {
  return ptforge::shell::main_entry(argc, argv);
}
