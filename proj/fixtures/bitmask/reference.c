/* Replace the n bits of value starting at position p with the last n bits of second. */
#include <stdio.h>

int main() {
  unsigned int value;
  unsigned int second;
  int p;
  int n;
  unsigned int mask;
  scanf("%x", &value);
  scanf("%x", &second);
  scanf("%d", &p);
  scanf("%d", &n);
  mask = 255;
  mask = mask >> (8 - n);
  mask = mask << p;
  value = value & ~mask;
  second = second << p;
  second = second & mask;
  value = value | second;
  printf("%x\n", value);
  return 0;
}
