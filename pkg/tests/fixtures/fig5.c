// Three same-size arrays; c holds the elementwise sum of a and b.
int a[100000], b[100000], c[100000];
int i, v;

main()
{
  for (i = 0; i < 100000; i++)
  {
    v = input();
    a[i] = v;
    v = input();
    b[i] = v;
  }
  for (i = 0; i < 100000; i++)
  {
    c[i] = a[i] + b[i];
  }
  for (i = 0; i < 100000; i++)
  {
    assert(c[i] == a[i] + b[i]);
  }
}
