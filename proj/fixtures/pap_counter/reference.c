/* Count occurrences of "pap" in the words of input.txt (overlaps allowed). */
#include <stdio.h>

FILE *fp;
char s[32];
char c;
int len;
int count;
int words;

void scan_word() {
  int i;
  int first;
  int second;
  i = 0;
  first = -1;
  second = -1;
  while (i < len) {
    if (s[i] == 'p') {
      if (second == 1) {
        count++;
      }
      first = 1;
      second = -1;
    } else {
      if (first == 1 && s[i] == 'a') {
        second = 1;
      } else {
        second = -1;
      }
      first = -1;
    }
    i++;
  }
  if (len > 0) {
    words++;
  }
}

int main() {
  fp = fopen("input.txt", "r");
  if (fp == NULL) {
    printf("cannot open input.txt\n");
    return 1;
  }
  count = 0;
  words = 0;
  len = 0;
  while (fscanf(fp, "%c", &c) == 1) {
    if (c == ' ' || c == '\t' || c == '\n') {
      scan_word();
      len = 0;
    } else {
      if (len < 31) {
        s[len] = c;
        len++;
      }
    }
  }
  scan_word();
  fclose(fp);
  printf("%d %d\n", count, words);
  return 0;
}
