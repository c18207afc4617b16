// Scaled copy of fig5.c (arrays of size 4) for exhaustive enumeration.
int a[4], b[4], c[4];
int i, v;

main()
{
  for (i = 0; i < 4; i++)
  {
    v = input();
    a[i] = v;
    v = input();
    b[i] = v;
  }
  for (i = 0; i < 4; i++)
  {
    c[i] = a[i] + b[i];
  }
  for (i = 0; i < 4; i++)
  {
    assert(c[i] == a[i] + b[i]);
  }
}
