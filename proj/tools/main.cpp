#include <iostream>

int main() {
  std::cout << "handrec placeholder\n";
  return 0;
}
